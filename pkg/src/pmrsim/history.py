"""Append-only event history with range queries and daily aggregates.

Records live in a newline-delimited text file, one ``t_ms,kind,value``
triple per line, so the file stays human-inspectable and a torn final
line (interrupted write) costs at most one record.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

log = logging.getLogger(__name__)

_EPOCH = date(1970, 1, 1)
_DAY_MS = 86_400_000


class CorruptRecordError(ValueError):
    """A malformed record line before the end of the file."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class RecordKind(enum.IntEnum):
    LEVEL = 0
    SQUEEZE = 1
    PROMPT = 2
    SESSION_STARTED = 3
    SESSION_COMPLETED = 4
    SESSION_CANCELLED = 5
    SILENT_ON = 6
    SILENT_OFF = 7

    @property
    def label(self) -> str:
        return self.name.lower()


_KIND_BY_LABEL = {k.label: k for k in RecordKind}


@dataclass(frozen=True, slots=True)
class HistoryRecord:
    t_ms: int
    kind: RecordKind
    value: int  # accumulator for LEVEL, peak for SQUEEZE, 0 otherwise

    def __post_init__(self) -> None:
        if self.t_ms < 0:
            raise ValueError("t_ms must be >= 0")
        if not 0 <= self.value <= 0xFFFF:
            raise ValueError("value must fit in u16")


@dataclass(frozen=True, slots=True)
class DayAggregate:
    day: date
    mean_level: float
    max_level: int
    squeeze_count: int
    sessions_completed: int


def _format_line(record: HistoryRecord) -> str:
    return f"{record.t_ms},{record.kind.label},{record.value}\n"


def _parse_line(line: str, line_no: int) -> HistoryRecord:
    parts = line.split(",")
    if len(parts) != 3:
        raise CorruptRecordError(line_no, "expected 3 comma-separated fields")
    t_text, kind_label, value_text = parts
    kind = _KIND_BY_LABEL.get(kind_label)
    if kind is None:
        raise CorruptRecordError(line_no, f"unknown kind {kind_label!r}")
    try:
        t_ms = int(t_text)
        value = int(value_text)
    except ValueError:
        raise CorruptRecordError(line_no, "non-integer field") from None
    try:
        return HistoryRecord(t_ms, kind, value)
    except ValueError as exc:
        raise CorruptRecordError(line_no, str(exc)) from None


class HistoryStore:
    """Ordered record log, optionally backed by a file.

    With a path, every append lands on disk before returning (pass
    ``flush_each=False`` to let the OS batch writes). Without a path the
    store is memory-only.
    """

    def __init__(self, path: Path | str | None = None, *, flush_each: bool = True):
        self.path = Path(path) if path is not None else None
        self.flush_each = flush_each
        self._records: list[HistoryRecord] = []
        self._file = None
        self._truncate_to: int | None = None
        self.load_warnings: list[str] = []

    @classmethod
    def load(cls, path: Path | str, *, flush_each: bool = True) -> "HistoryStore":
        """Rebuild a store from its file; a missing file means empty.

        A torn final line (no trailing newline) is dropped with a warning
        and its bytes are overwritten by the next append. A malformed
        complete line raises CorruptRecordError.
        """
        store = cls(path, flush_each=flush_each)
        p = store.path
        assert p is not None
        if not p.exists():
            return store
        data = p.read_bytes()
        valid_end = 0
        line_no = 0
        start = 0
        while start < len(data):
            newline = data.find(b"\n", start)
            if newline == -1:
                # Torn tail: keep the offset so the next append overwrites it.
                tail = data[start:]
                msg = f"ignored torn final line ({len(tail)} bytes) in {p}"
                store.load_warnings.append(msg)
                log.warning(msg)
                store._truncate_to = valid_end
                break
            line_no += 1
            line = data[start:newline].decode("utf-8")
            store._records.append(_parse_line(line, line_no))
            start = newline + 1
            valid_end = start
        return store

    @property
    def records(self) -> list[HistoryRecord]:
        return list(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def append(self, record: HistoryRecord) -> None:
        """Add a record to memory and, if file-backed, durably to disk."""
        if self.path is not None:
            if self._file is None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                self._file = open(self.path, "r+b" if self.path.exists() else "wb")
                if self._truncate_to is not None:
                    self._file.truncate(self._truncate_to)
                    self._truncate_to = None
                self._file.seek(0, 2)
            self._file.write(_format_line(record).encode("utf-8"))
            if self.flush_each:
                self._file.flush()
        self._records.append(record)

    def close(self) -> None:
        if self._file is not None:
            self._file.flush()
            self._file.close()
            self._file = None

    def __enter__(self) -> "HistoryStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def query_range(self, from_ms: int, to_ms: int) -> list[HistoryRecord]:
        """Records with from_ms <= t_ms < to_ms, in append order."""
        if from_ms > to_ms:
            raise ValueError("from_ms must be <= to_ms")
        return [r for r in self._records if from_ms <= r.t_ms < to_ms]


def day_of(t_ms: int) -> date:
    return _EPOCH + timedelta(days=t_ms // _DAY_MS)


def aggregate_daily(records: list[HistoryRecord]) -> list[DayAggregate]:
    """Bucket records by UTC day, ascending; empty input gives []."""
    buckets: dict[date, list[HistoryRecord]] = {}
    for record in records:
        buckets.setdefault(day_of(record.t_ms), []).append(record)
    aggregates = []
    for day in sorted(buckets):
        day_records = buckets[day]
        levels = [r.value for r in day_records if r.kind is RecordKind.LEVEL]
        aggregates.append(
            DayAggregate(
                day=day,
                mean_level=sum(levels) / len(levels) if levels else 0.0,
                max_level=max(levels) if levels else 0,
                squeeze_count=sum(
                    1 for r in day_records if r.kind is RecordKind.SQUEEZE
                ),
                sessions_completed=sum(
                    1 for r in day_records if r.kind is RecordKind.SESSION_COMPLETED
                ),
            )
        )
    return aggregates
