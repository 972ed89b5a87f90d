"""Seeded random traces and event walks shared across test modules."""

from __future__ import annotations

import random

from pmrsim.device import (
    AppCommand,
    Button,
    ButtonKind,
    DeviceConfig,
    Event,
    PressureSample,
    Sample,
    Tick,
)
from pmrsim.protocol import CommandKind


def random_trace(
    rng: random.Random, n: int, config: DeviceConfig, dt_ms: int = 50
) -> list[tuple[int, int]]:
    """Pressure trace that wanders across both hysteresis thresholds."""
    trace = []
    t = 0
    target = 0
    for _ in range(n):
        if rng.random() < 0.12:
            if target < config.p_hi:
                target = rng.randint(config.p_hi, 1023)
            else:
                target = rng.randint(0, config.p_lo)
        pressure = max(0, min(1023, target + rng.randint(-80, 80)))
        trace.append((t, pressure))
        t += rng.randint(1, dt_ms)
    return trace


def random_events(
    rng: random.Random, n: int, config: DeviceConfig
) -> list[Event]:
    """Mixed event sequence with non-decreasing timestamps."""
    events: list[Event] = []
    t = 0
    target = 0
    for _ in range(n):
        t += rng.randint(0, 30)
        roll = rng.random()
        if roll < 0.6:
            if rng.random() < 0.10:
                if target < config.p_hi:
                    target = rng.randint(config.p_hi, 1023)
                else:
                    target = rng.randint(0, config.p_lo)
            pressure = max(0, min(1023, target + rng.randint(-60, 60)))
            events.append(Sample(PressureSample(t, pressure)))
        elif roll < 0.8:
            events.append(Tick(t))
        elif roll < 0.9:
            events.append(Button(t, rng.choice(list(ButtonKind))))
        else:
            events.append(AppCommand(t, rng.choice(list(CommandKind))))
    return events
