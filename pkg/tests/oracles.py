"""Independent reference implementations used to check the package.

Everything here is deliberately written with different algorithms and
different library calls than the code under test: bitwise CRC instead of
table-driven, offline interval scans instead of streaming hysteresis,
float datetime bucketing instead of integer day arithmetic.
"""

from __future__ import annotations

import statistics
from datetime import datetime, timezone


def crc16_bitwise(data: bytes) -> int:
    """CRC-16/CCITT-FALSE, one bit at a time."""
    crc = 0xFFFF
    for b in data:
        crc ^= b << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ 0x1021) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
    return crc


def build_frame(msg_type: int, payload: bytes) -> bytes:
    """Frame a payload by hand, independent of the package encoder."""
    header = bytes([msg_type, len(payload) & 0xFF, (len(payload) >> 8) & 0xFF])
    crc = crc16_bitwise(header + payload)
    return bytes([0xA5]) + header + payload + bytes([crc & 0xFF, crc >> 8])


def scan_squeezes(
    trace: list[tuple[int, int]], p_hi: int, p_lo: int
) -> list[tuple[int, int, int]]:
    """Offline two-pass squeeze scan over a whole (t_ms, pressure) trace.

    Finds maximal [rise-to-p_hi ... fall-to-p_lo] intervals and returns
    (release_t_ms, peak, duration_ms) per interval, mirroring what the
    streaming detector should produce.
    """
    events = []
    n = len(trace)
    i = 0
    while i < n:
        if trace[i][1] >= p_hi:
            j = i + 1
            while j < n and trace[j][1] > p_lo:
                j += 1
            if j < n:
                peak = max(p for _, p in trace[i : j + 1])
                events.append((trace[j][0], peak, trace[j][0] - trace[i][0]))
            i = j + 1
        else:
            i += 1
    return events


def daily_buckets(records) -> list:
    """Brute-force daily aggregation using datetime/statistics."""
    from pmrsim.history import DayAggregate, RecordKind

    by_day: dict = {}
    for r in records:
        day = datetime.fromtimestamp(r.t_ms / 1000.0, tz=timezone.utc).date()
        by_day.setdefault(day, []).append(r)
    out = []
    for day in sorted(by_day):
        rs = by_day[day]
        levels = [r.value for r in rs if r.kind == RecordKind.LEVEL]
        out.append(
            DayAggregate(
                day=day,
                mean_level=statistics.fmean(levels) if levels else 0.0,
                max_level=max(levels) if levels else 0,
                squeeze_count=len([r for r in rs if r.kind == RecordKind.SQUEEZE]),
                sessions_completed=len(
                    [r for r in rs if r.kind == RecordKind.SESSION_COMPLETED]
                ),
            )
        )
    return out


def filter_range(records, from_ms: int, to_ms: int) -> list:
    """Linear-scan half-open time filter."""
    return [r for r in records if from_ms <= r.t_ms < to_ms]


def random_message(rng):
    """One syntactically valid message, drawn uniformly across types."""
    from pmrsim.history import HistoryRecord, RecordKind
    from pmrsim.pmr import Phase
    from pmrsim import protocol as p

    u64 = lambda: rng.randint(0, 2**64 - 1)
    u16 = lambda: rng.randint(0, 0xFFFF)
    u8 = lambda: rng.randint(0, 0xFF)
    kind = rng.randrange(8)
    if kind == 0:
        return p.LevelUpdate(u64(), u16(), u8())
    if kind == 1:
        return p.Squeeze(u64(), u16(), u16())
    if kind == 2:
        return p.TrainingPrompt(u64())
    if kind == 3:
        return p.SessionEvent(
            u64(),
            rng.choice(list(p.SessionEventKind)),
            u8(),
            rng.choice(list(Phase)),
        )
    if kind == 4:
        return p.SilentMode(u64(), rng.random() < 0.5)
    if kind == 5:
        return p.Command(rng.choice(list(p.CommandKind)))
    if kind == 6:
        return p.HistoryRequest(u64(), u64())
    records = tuple(
        HistoryRecord(u64(), rng.choice(list(RecordKind)), u16())
        for _ in range(rng.randint(0, p.MAX_RESPONSE_RECORDS))
    )
    return p.HistoryResponse(records)
