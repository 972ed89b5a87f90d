"""Simulator configuration files: flat ``key = value`` text.

Lines starting with ``#`` (or blank) are skipped, and ``#`` starts a
trailing comment. Keys match the device configuration fields, plus
``plan_path`` and ``history_path``; anything else is an error. Relative
paths are resolved against the config file's directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .device import ConfigError, DeviceConfig
from .pmr import PlanError, PmrPlan, default_plan, load_plan

_INT_KEYS = (
    "p_hi",
    "p_lo",
    "a_max",
    "delta_min",
    "delta_max",
    "led_count",
    "tick_ms",
    "decay_half_life_ms",
)
_FLOAT_KEYS = ("cancel_reset_fraction",)
_PATH_KEYS = ("plan_path", "history_path")
KNOWN_KEYS = frozenset(_INT_KEYS + _FLOAT_KEYS + _PATH_KEYS)


@dataclass(frozen=True)
class SimConfig:
    device: DeviceConfig = field(default_factory=DeviceConfig)
    history_path: Path | None = None


def parse_config(text: str, base_dir: Path | None = None) -> SimConfig:
    base = base_dir or Path.cwd()
    values: dict[str, object] = {}
    history_path: Path | None = None
    plan: PmrPlan | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values or (key == "plan_path" and plan) or (
            key == "history_path" and history_path
        ):
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be an integer") from None
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be a number") from None
        elif key == "plan_path":
            plan_path = base / value
            try:
                plan = load_plan(plan_path.read_bytes())
            except OSError as exc:
                raise ConfigError(f"line {lineno}: cannot read plan: {exc}") from None
            except PlanError as exc:
                raise ConfigError(f"line {lineno}: bad plan: {exc}") from None
        else:
            history_path = base / value
    device = DeviceConfig(plan=plan or default_plan(), **values)
    return SimConfig(device=device, history_path=history_path)


def load_config(path: Path | str) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, base_dir=path.parent)
