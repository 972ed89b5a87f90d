"""Pressure traces: CSV files and seeded synthetic generators."""

from __future__ import annotations

import csv
import io
import random
from pathlib import Path

from .device import ADC_MAX, DeviceConfig, PressureSample

SAMPLE_PERIOD_MS = 50
PROFILES = ("calm", "stressed")


class TraceError(ValueError):
    """A trace file is malformed; line_no locates the problem."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


def parse_trace(text: str) -> list[PressureSample]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != ["t_ms", "pressure"]:
        raise TraceError(1, "expected header 't_ms,pressure'")
    samples: list[PressureSample] = []
    last_t = -1
    for line_no, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise TraceError(line_no, "expected 2 columns")
        try:
            t_ms = int(row[0])
            pressure = int(row[1])
        except ValueError:
            raise TraceError(line_no, "non-integer value") from None
        if t_ms < last_t:
            raise TraceError(line_no, f"t_ms {t_ms} goes backwards")
        if not 0 <= pressure <= ADC_MAX:
            raise TraceError(line_no, f"pressure {pressure} outside [0, {ADC_MAX}]")
        samples.append(PressureSample(t_ms, pressure))
        last_t = t_ms
    return samples


def load_trace(path: Path | str) -> list[PressureSample]:
    return parse_trace(Path(path).read_text(encoding="utf-8"))


def save_trace(path: Path | str, samples: list[PressureSample]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t_ms", "pressure"])
        for s in samples:
            writer.writerow([s.t_ms, s.pressure])


def gen_trace(
    seed: int,
    profile: str,
    duration_ms: int,
    config: DeviceConfig | None = None,
) -> list[PressureSample]:
    """Deterministic synthetic trace sampled every 50 ms.

    calm: fidgeting that never reaches the squeeze threshold.
    stressed: squeeze bursts (ramp, hold, release) with idle gaps.
    """
    if profile not in PROFILES:
        raise ValueError(f"profile must be one of {PROFILES}, got {profile!r}")
    if duration_ms < 0:
        raise ValueError("duration_ms must be >= 0")
    config = config or DeviceConfig()
    rng = random.Random(seed)
    n = duration_ms // SAMPLE_PERIOD_MS
    samples: list[PressureSample] = []

    if profile == "calm":
        ceiling = config.p_hi * 8 // 10
        for i in range(n):
            samples.append(PressureSample(i * SAMPLE_PERIOD_MS, rng.randint(0, ceiling)))
        return samples

    idle_ceiling = config.p_lo // 2
    i = 0
    while i < n:
        for _ in range(rng.randint(6, 30)):  # idle gap, 0.3-1.5 s
            if i >= n:
                return samples
            samples.append(
                PressureSample(i * SAMPLE_PERIOD_MS, rng.randint(0, idle_ceiling))
            )
            i += 1
        peak = rng.randint(config.p_hi, ADC_MAX)
        ramp = rng.randint(2, 5)
        for k in range(1, ramp + 1):  # ramp up to the peak
            if i >= n:
                return samples
            samples.append(PressureSample(i * SAMPLE_PERIOD_MS, peak * k // ramp))
            i += 1
        for _ in range(rng.randint(2, 8)):  # hold just under the peak
            if i >= n:
                return samples
            held = max(config.p_hi, peak - rng.randint(0, 30))
            samples.append(PressureSample(i * SAMPLE_PERIOD_MS, held))
            i += 1
    return samples
