"""History reports: daily-aggregate CSV plus rendered charts.

Reads a history file, filters an optional time window, and writes three
artifacts into the output directory: daily.csv (delimited aggregates),
levels.png (anxiety level and squeezes over time), and daily.png
(per-day summary bars).
"""

from __future__ import annotations

import csv
from datetime import datetime, timezone
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .history import (
    DayAggregate,
    HistoryRecord,
    HistoryStore,
    RecordKind,
    aggregate_daily,
)

CSV_COLUMNS = ["day", "mean_level", "max_level", "squeeze_count", "sessions_completed"]


def write_daily_csv(aggregates: list[DayAggregate], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for agg in aggregates:
            writer.writerow(
                [
                    agg.day.isoformat(),
                    f"{agg.mean_level:.3f}",
                    agg.max_level,
                    agg.squeeze_count,
                    agg.sessions_completed,
                ]
            )


def _as_datetime(t_ms: int) -> datetime:
    return datetime.fromtimestamp(t_ms / 1000.0, tz=timezone.utc)


def plot_levels(records: list[HistoryRecord], path: Path) -> None:
    """Step plot of the accumulator with squeeze peaks overlaid."""
    levels = [r for r in records if r.kind is RecordKind.LEVEL]
    squeezes = [r for r in records if r.kind is RecordKind.SQUEEZE]
    fig, ax = plt.subplots(figsize=(10, 4))
    if levels:
        ax.step(
            [_as_datetime(r.t_ms) for r in levels],
            [r.value for r in levels],
            where="post",
            label="anxiety level",
        )
    if squeezes:
        ax.plot(
            [_as_datetime(r.t_ms) for r in squeezes],
            [r.value for r in squeezes],
            linestyle="none",
            marker="x",
            alpha=0.6,
            label="squeeze peak",
        )
    if not levels and not squeezes:
        ax.text(0.5, 0.5, "no records in range", ha="center", va="center",
                transform=ax.transAxes)
    else:
        ax.legend(loc="upper left")
    ax.set_xlabel("time (UTC)")
    ax.set_ylabel("level / peak")
    ax.set_title("Anxiety level over time")
    fig.autofmt_xdate()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_daily(aggregates: list[DayAggregate], path: Path) -> None:
    """Per-day bars: mean/max level on top, activity counts below."""
    fig, (ax_levels, ax_counts) = plt.subplots(
        2, 1, figsize=(10, 6), sharex=True
    )
    if aggregates:
        days = [agg.day.isoformat() for agg in aggregates]
        x = range(len(days))
        ax_levels.bar(
            [i - 0.2 for i in x],
            [agg.mean_level for agg in aggregates],
            width=0.4,
            label="mean level",
        )
        ax_levels.bar(
            [i + 0.2 for i in x],
            [agg.max_level for agg in aggregates],
            width=0.4,
            label="max level",
        )
        ax_counts.bar(
            [i - 0.2 for i in x],
            [agg.squeeze_count for agg in aggregates],
            width=0.4,
            label="squeezes",
        )
        ax_counts.bar(
            [i + 0.2 for i in x],
            [agg.sessions_completed for agg in aggregates],
            width=0.4,
            label="sessions completed",
        )
        ax_counts.set_xticks(list(x))
        ax_counts.set_xticklabels(days, rotation=30, ha="right")
        ax_levels.legend()
        ax_counts.legend()
    else:
        ax_levels.text(0.5, 0.5, "no records in range", ha="center", va="center",
                       transform=ax_levels.transAxes)
    ax_levels.set_ylabel("accumulator units")
    ax_counts.set_ylabel("count")
    ax_levels.set_title("Daily summary")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def generate_report(
    history_path: Path | str,
    out_dir: Path | str,
    from_ms: int | None = None,
    to_ms: int | None = None,
) -> dict[str, Path]:
    """Write daily.csv, levels.png, and daily.png; returns their paths."""
    store = HistoryStore.load(history_path)
    records = store.records
    if from_ms is not None or to_ms is not None:
        lo = from_ms if from_ms is not None else 0
        hi = to_ms if to_ms is not None else (max((r.t_ms for r in records), default=0) + 1)
        records = store.query_range(lo, hi)
    aggregates = aggregate_daily(records)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "daily_csv": out / "daily.csv",
        "levels_png": out / "levels.png",
        "daily_png": out / "daily.png",
    }
    write_daily_csv(aggregates, paths["daily_csv"])
    plot_levels(records, paths["levels_png"])
    plot_daily(aggregates, paths["daily_png"])
    return paths
