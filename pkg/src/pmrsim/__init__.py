"""Deterministic simulator for a squeeze-ball relaxation trainer."""

__version__ = "0.1.0"
