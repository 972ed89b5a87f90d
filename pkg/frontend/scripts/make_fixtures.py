"""Regenerate the frontend test fixtures from the simulator.

Run from the repo root:  python frontend/scripts/make_fixtures.py

Produces, under frontend/tests/fixtures/:
  journey.jsonl   full replay: squeezes -> prompt -> session -> completion
  cancel.jsonl    replay with silent toggle and a mid-session cancel
  store1.json ... three seeded history stores as wire JSON, with the
                  expected daily aggregates for cross-checking the app
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from pmrsim.config import SimConfig
from pmrsim.device import ButtonKind, DeviceConfig, PressureSample
from pmrsim.history import HistoryRecord, RecordKind, aggregate_daily
from pmrsim.protocol import HistoryResponse, message_to_dict
from pmrsim.simulator import SimRun, run

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
DAY_MS = 86_400_000


def squeeze_trace(count: int) -> list[PressureSample]:
    samples = []
    for i in range(count):
        t = i * 500
        samples.append(PressureSample(t, 0))
        samples.append(PressureSample(t + 100, 1023))
        samples.append(PressureSample(t + 200, 0))
    return samples


def write_log(name: str, script: list[tuple[int, ButtonKind]]) -> None:
    config = SimConfig(device=DeviceConfig(a_max=300, tick_ms=50))
    result = run(SimRun(config, squeeze_trace(3), script))
    path = FIXTURES / name
    path.write_text("\n".join(result.log_lines) + "\n")
    print(f"wrote {path} ({len(result.log_lines)} lines)")


def write_store(name: str, seed: int) -> None:
    rng = random.Random(seed)
    records = []
    t = 0
    for _ in range(rng.randint(40, 80)):
        t += rng.randint(1_000_000, 4 * 3_600_000)
        kind = rng.choice(
            [
                RecordKind.LEVEL,
                RecordKind.LEVEL,
                RecordKind.SQUEEZE,
                RecordKind.PROMPT,
                RecordKind.SESSION_COMPLETED,
            ]
        )
        value = rng.randint(0, 1000) if kind is not RecordKind.SESSION_COMPLETED else 0
        records.append(HistoryRecord(t, kind, value))
    from_ms, to_ms = 0, t + 1
    fixture = {
        "request": {"from_ms": from_ms, "to_ms": to_ms},
        "response": message_to_dict(HistoryResponse(tuple(records))),
        "expected_count": len(records),
        "expected_daily": [
            {
                "day": agg.day.isoformat(),
                "mean_level": agg.mean_level,
                "max_level": agg.max_level,
                "squeeze_count": agg.squeeze_count,
                "sessions_completed": agg.sessions_completed,
            }
            for agg in aggregate_daily(records)
        ],
    }
    path = FIXTURES / name
    path.write_text(json.dumps(fixture, indent=1) + "\n")
    print(f"wrote {path} ({len(records)} records, "
          f"{len(fixture['expected_daily'])} days)")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    write_log(
        "journey.jsonl",
        [(2000, ButtonKind.SILENT), (3000, ButtonKind.START)],
    )
    write_log(
        "cancel.jsonl",
        [
            (2000, ButtonKind.SILENT),
            (3000, ButtonKind.START),
            (20_000, ButtonKind.CANCEL),
        ],
    )
    for i, seed in enumerate((101, 202, 303), start=1):
        write_store(f"store{i}.json", seed)


if __name__ == "__main__":
    main()
