"""Framed binary telemetry link between the device and a host or app.

Wire format, all integers little-endian:

    +------+----------+---------+----------------+---------+
    | 0xA5 | msg_type | len u16 | payload (len B)| crc u16 |
    +------+----------+---------+----------------+---------+

The CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection,
no final XOR) over msg_type, len, and payload. Payloads are capped at
1024 bytes so decoder memory stays bounded; longer history responses are
split across frames.

Message payloads:

    0x01 level_update     t_ms u64, accumulator u16, led_level u8
    0x02 squeeze          t_ms u64, peak u16, duration_ms u16
    0x03 training_prompt  t_ms u64
    0x04 session_event    t_ms u64, kind u8, step u8, phase u8
    0x05 silent_mode      t_ms u64, on u8
    0x10 command          cmd u8
    0x11 history_request  from_ms u64, to_ms u64
    0x12 history_response count u16, count x (t_ms u64, kind u8, value u16)

Every message also has a canonical JSON form (type tag first, then the
fields in wire order, compact separators) used on the WebSocket mirror
and in event logs; see message_to_json / message_from_json.
"""

from __future__ import annotations

import enum
import json
import struct
from dataclasses import dataclass

from .history import HistoryRecord, RecordKind
from .pmr import Phase

SYNC = 0xA5
MAX_PAYLOAD = 1024
# count u16 plus 11 bytes per record within the payload cap
MAX_RESPONSE_RECORDS = (MAX_PAYLOAD - 2) // 11


class ProtocolError(Exception):
    pass


class OversizeError(ProtocolError):
    """Encoded payload would exceed the 1024-byte cap."""


class RangeError(ProtocolError):
    """A message field does not fit its wire representation."""


class SessionEventKind(enum.IntEnum):
    STARTED = 0
    STEP_ADVANCED = 1
    PHASE_CHANGED = 2
    COMPLETED = 3
    CANCELLED = 4


class CommandKind(enum.IntEnum):
    START_TRAINING = 0
    CANCEL_TRAINING = 1
    TOGGLE_SILENT = 2


@dataclass(frozen=True, slots=True)
class LevelUpdate:
    t_ms: int
    accumulator: int
    led_level: int


@dataclass(frozen=True, slots=True)
class Squeeze:
    t_ms: int
    peak: int
    duration_ms: int


@dataclass(frozen=True, slots=True)
class TrainingPrompt:
    t_ms: int


@dataclass(frozen=True, slots=True)
class SessionEvent:
    t_ms: int
    kind: SessionEventKind
    step: int
    phase: Phase


@dataclass(frozen=True, slots=True)
class SilentMode:
    t_ms: int
    on: bool


@dataclass(frozen=True, slots=True)
class Command:
    cmd: CommandKind


@dataclass(frozen=True, slots=True)
class HistoryRequest:
    from_ms: int
    to_ms: int


@dataclass(frozen=True, slots=True)
class HistoryResponse:
    records: tuple[HistoryRecord, ...]

    @property
    def count(self) -> int:
        return len(self.records)


Message = (
    LevelUpdate
    | Squeeze
    | TrainingPrompt
    | SessionEvent
    | SilentMode
    | Command
    | HistoryRequest
    | HistoryResponse
)

TYPE_LEVEL_UPDATE = 0x01
TYPE_SQUEEZE = 0x02
TYPE_TRAINING_PROMPT = 0x03
TYPE_SESSION_EVENT = 0x04
TYPE_SILENT_MODE = 0x05
TYPE_COMMAND = 0x10
TYPE_HISTORY_REQUEST = 0x11
TYPE_HISTORY_RESPONSE = 0x12

_KNOWN_TYPES = frozenset(
    {0x01, 0x02, 0x03, 0x04, 0x05, 0x10, 0x11, 0x12}
)


# --- CRC-16/CCITT-FALSE ------------------------------------------------

_CRC_TABLE = []
for _i in range(256):
    _crc = _i << 8
    for _ in range(8):
        _crc = ((_crc << 1) ^ 0x1021) if _crc & 0x8000 else (_crc << 1)
        _crc &= 0xFFFF
    _CRC_TABLE.append(_crc)
del _i, _crc


def crc16(data: bytes) -> int:
    """CRC-16/CCITT-FALSE; crc16(b"123456789") == 0x29B1."""
    crc = 0xFFFF
    for b in data:
        crc = ((crc << 8) & 0xFFFF) ^ _CRC_TABLE[(crc >> 8) ^ b]
    return crc


# --- Encoding -----------------------------------------------------------


def _check_u(name: str, value: int, bits: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < (1 << bits):
        raise RangeError(f"{name} must be an unsigned {bits}-bit integer, got {value!r}")
    return value


def _pack_payload(message: Message) -> tuple[int, bytes]:
    if isinstance(message, LevelUpdate):
        return TYPE_LEVEL_UPDATE, struct.pack(
            "<QHB",
            _check_u("t_ms", message.t_ms, 64),
            _check_u("accumulator", message.accumulator, 16),
            _check_u("led_level", message.led_level, 8),
        )
    if isinstance(message, Squeeze):
        return TYPE_SQUEEZE, struct.pack(
            "<QHH",
            _check_u("t_ms", message.t_ms, 64),
            _check_u("peak", message.peak, 16),
            _check_u("duration_ms", message.duration_ms, 16),
        )
    if isinstance(message, TrainingPrompt):
        return TYPE_TRAINING_PROMPT, struct.pack(
            "<Q", _check_u("t_ms", message.t_ms, 64)
        )
    if isinstance(message, SessionEvent):
        if message.kind not in SessionEventKind.__members__.values():
            raise RangeError(f"bad session event kind {message.kind!r}")
        if message.phase not in (Phase.TENSE, Phase.RELAX):
            raise RangeError(f"bad phase {message.phase!r}")
        return TYPE_SESSION_EVENT, struct.pack(
            "<QBBB",
            _check_u("t_ms", message.t_ms, 64),
            int(message.kind),
            _check_u("step", message.step, 8),
            int(message.phase),
        )
    if isinstance(message, SilentMode):
        return TYPE_SILENT_MODE, struct.pack(
            "<QB", _check_u("t_ms", message.t_ms, 64), 1 if message.on else 0
        )
    if isinstance(message, Command):
        if message.cmd not in CommandKind.__members__.values():
            raise RangeError(f"bad command {message.cmd!r}")
        return TYPE_COMMAND, struct.pack("<B", int(message.cmd))
    if isinstance(message, HistoryRequest):
        return TYPE_HISTORY_REQUEST, struct.pack(
            "<QQ",
            _check_u("from_ms", message.from_ms, 64),
            _check_u("to_ms", message.to_ms, 64),
        )
    if isinstance(message, HistoryResponse):
        parts = [struct.pack("<H", _check_u("count", message.count, 16))]
        for record in message.records:
            if record.kind not in RecordKind.__members__.values():
                raise RangeError(f"bad record kind {record.kind!r}")
            parts.append(
                struct.pack(
                    "<QBH",
                    _check_u("t_ms", record.t_ms, 64),
                    int(record.kind),
                    _check_u("value", record.value, 16),
                )
            )
        return TYPE_HISTORY_RESPONSE, b"".join(parts)
    raise ProtocolError(f"not a protocol message: {message!r}")


def encode(message: Message) -> bytes:
    """Encode one message as a complete frame."""
    msg_type, payload = _pack_payload(message)
    if len(payload) > MAX_PAYLOAD:
        raise OversizeError(
            f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}"
        )
    body = struct.pack("<BH", msg_type, len(payload)) + payload
    return bytes([SYNC]) + body + struct.pack("<H", crc16(body))


# --- Decoding -----------------------------------------------------------


class _PayloadError(Exception):
    pass


def _unpack_payload(msg_type: int, payload: bytes) -> Message:
    fixed = {
        TYPE_LEVEL_UPDATE: 11,
        TYPE_SQUEEZE: 12,
        TYPE_TRAINING_PROMPT: 8,
        TYPE_SESSION_EVENT: 11,
        TYPE_SILENT_MODE: 9,
        TYPE_COMMAND: 1,
        TYPE_HISTORY_REQUEST: 16,
    }
    expected = fixed.get(msg_type)
    if expected is not None and len(payload) != expected:
        raise _PayloadError(
            f"type 0x{msg_type:02X} expects {expected} payload bytes, got {len(payload)}"
        )
    if msg_type == TYPE_LEVEL_UPDATE:
        t_ms, accumulator, led_level = struct.unpack("<QHB", payload)
        return LevelUpdate(t_ms, accumulator, led_level)
    if msg_type == TYPE_SQUEEZE:
        t_ms, peak, duration_ms = struct.unpack("<QHH", payload)
        return Squeeze(t_ms, peak, duration_ms)
    if msg_type == TYPE_TRAINING_PROMPT:
        (t_ms,) = struct.unpack("<Q", payload)
        return TrainingPrompt(t_ms)
    if msg_type == TYPE_SESSION_EVENT:
        t_ms, kind, step, phase = struct.unpack("<QBBB", payload)
        try:
            return SessionEvent(t_ms, SessionEventKind(kind), step, Phase(phase))
        except ValueError as exc:
            raise _PayloadError(str(exc)) from None
    if msg_type == TYPE_SILENT_MODE:
        t_ms, on = struct.unpack("<QB", payload)
        if on not in (0, 1):
            raise _PayloadError(f"silent_mode on must be 0 or 1, got {on}")
        return SilentMode(t_ms, bool(on))
    if msg_type == TYPE_COMMAND:
        (cmd,) = struct.unpack("<B", payload)
        try:
            return Command(CommandKind(cmd))
        except ValueError as exc:
            raise _PayloadError(str(exc)) from None
    if msg_type == TYPE_HISTORY_REQUEST:
        from_ms, to_ms = struct.unpack("<QQ", payload)
        return HistoryRequest(from_ms, to_ms)
    if msg_type == TYPE_HISTORY_RESPONSE:
        if len(payload) < 2:
            raise _PayloadError("history_response payload shorter than its count")
        (count,) = struct.unpack_from("<H", payload)
        if len(payload) != 2 + 11 * count:
            raise _PayloadError(
                f"history_response count {count} does not match payload length"
            )
        records = []
        for i in range(count):
            t_ms, kind, value = struct.unpack_from("<QBH", payload, 2 + 11 * i)
            try:
                records.append(HistoryRecord(t_ms, RecordKind(kind), value))
            except ValueError as exc:
                raise _PayloadError(str(exc)) from None
        return HistoryResponse(tuple(records))
    raise _PayloadError(f"unknown message type 0x{msg_type:02X}")


class DiagnosticKind(enum.Enum):
    BAD_SYNC = "bad_sync"
    BAD_TYPE = "bad_type"
    BAD_LENGTH = "bad_length"
    CRC_MISMATCH = "crc_mismatch"
    BAD_PAYLOAD = "bad_payload"
    TRUNCATED = "truncated"


@dataclass(frozen=True, slots=True)
class Diagnostic:
    kind: DiagnosticKind
    offset: int  # absolute byte offset into the stream
    detail: str


class StreamDecoder:
    """Incremental frame decoder that survives garbage and corruption.

    Feed arbitrary chunks through push(); complete CRC-valid frames come
    out as messages, anything else as diagnostics. Corrupt or misaligned
    input drops a single byte and rescans for the next sync byte, so the
    decoded sequence never depends on where chunk boundaries fall.
    """

    def __init__(self) -> None:
        self._buf = bytearray()
        self._offset = 0  # stream offset of _buf[0]
        self._garbage: tuple[int, int] | None = None  # (start offset, length)
        self._finished = False

    def push(self, data: bytes) -> tuple[list[Message], list[Diagnostic]]:
        """Consume a chunk; return (messages, diagnostics) found so far."""
        if self._finished:
            raise ValueError("decoder already finished")
        self._buf.extend(data)
        return self._drain(finishing=False)

    def finish(self) -> tuple[list[Message], list[Diagnostic]]:
        """Signal end of stream; flush incomplete frames as diagnostics.

        A frame candidate stalled waiting for bytes that will never come
        is reported as truncated and the scan resumes behind it, so valid
        frames buffered after a garbage sync byte still decode.
        """
        if self._finished:
            return [], []
        self._finished = True
        return self._drain(finishing=True)

    def _skip_garbage(self, count: int) -> None:
        if count == 0:
            return
        if self._garbage is None:
            self._garbage = (self._offset, count)
        else:
            start, length = self._garbage
            self._garbage = (start, length + count)
        del self._buf[:count]
        self._offset += count

    def _flush_garbage(self, diagnostics: list[Diagnostic]) -> None:
        if self._garbage is not None:
            start, length = self._garbage
            diagnostics.append(
                Diagnostic(
                    DiagnosticKind.BAD_SYNC,
                    start,
                    f"skipped {length} bytes before sync",
                )
            )
            self._garbage = None

    def _drop_sync_byte(self) -> None:
        # Abandon the current frame candidate; its sync byte is consumed
        # and the remainder rescanned.
        del self._buf[:1]
        self._offset += 1

    def _drain(self, finishing: bool) -> tuple[list[Message], list[Diagnostic]]:
        messages: list[Message] = []
        diagnostics: list[Diagnostic] = []
        while True:
            if not self._buf:
                if finishing:
                    self._flush_garbage(diagnostics)
                break
            if self._buf[0] != SYNC:
                idx = self._buf.find(SYNC)
                if idx == -1:
                    self._skip_garbage(len(self._buf))
                    if finishing:
                        self._flush_garbage(diagnostics)
                    break
                self._skip_garbage(idx)
            self._flush_garbage(diagnostics)

            def _incomplete() -> bool:
                """True when the loop should keep scanning after a stall."""
                if not finishing:
                    return False
                diagnostics.append(
                    Diagnostic(
                        DiagnosticKind.TRUNCATED,
                        self._offset,
                        "stream ended inside a frame",
                    )
                )
                self._drop_sync_byte()
                return True

            if len(self._buf) < 2:
                if _incomplete():
                    continue
                break
            msg_type = self._buf[1]
            if msg_type not in _KNOWN_TYPES:
                diagnostics.append(
                    Diagnostic(
                        DiagnosticKind.BAD_TYPE,
                        self._offset,
                        f"unknown message type 0x{msg_type:02X}",
                    )
                )
                self._drop_sync_byte()
                continue
            if len(self._buf) < 4:
                if _incomplete():
                    continue
                break
            length = int.from_bytes(self._buf[2:4], "little")
            if length > MAX_PAYLOAD:
                diagnostics.append(
                    Diagnostic(
                        DiagnosticKind.BAD_LENGTH,
                        self._offset,
                        f"payload length {length} exceeds {MAX_PAYLOAD}",
                    )
                )
                self._drop_sync_byte()
                continue
            total = 4 + length + 2
            if len(self._buf) < total:
                if _incomplete():
                    continue
                break
            body = bytes(self._buf[1 : 4 + length])
            received = int.from_bytes(self._buf[4 + length : total], "little")
            if crc16(body) != received:
                diagnostics.append(
                    Diagnostic(
                        DiagnosticKind.CRC_MISMATCH,
                        self._offset,
                        f"expected 0x{crc16(body):04X}, got 0x{received:04X}",
                    )
                )
                self._drop_sync_byte()
                continue
            try:
                message = _unpack_payload(msg_type, bytes(self._buf[4 : 4 + length]))
            except _PayloadError as exc:
                diagnostics.append(
                    Diagnostic(DiagnosticKind.BAD_PAYLOAD, self._offset, str(exc))
                )
                self._drop_sync_byte()
                continue
            messages.append(message)
            del self._buf[:total]
            self._offset += total
        return messages, diagnostics


def decode_all(data: bytes) -> tuple[list[Message], list[Diagnostic]]:
    """Decode a complete byte string in one shot."""
    decoder = StreamDecoder()
    messages, diagnostics = decoder.push(data)
    tail_messages, tail_diagnostics = decoder.finish()
    return messages + tail_messages, diagnostics + tail_diagnostics


# --- Canonical JSON mirror ----------------------------------------------

_TYPE_NAMES = {
    LevelUpdate: "level_update",
    Squeeze: "squeeze",
    TrainingPrompt: "training_prompt",
    SessionEvent: "session_event",
    SilentMode: "silent_mode",
    Command: "command",
    HistoryRequest: "history_request",
    HistoryResponse: "history_response",
}


def message_to_dict(message: Message) -> dict:
    """Message as a dict with the type tag first, fields in wire order."""
    if isinstance(message, LevelUpdate):
        return {
            "type": "level_update",
            "t_ms": message.t_ms,
            "accumulator": message.accumulator,
            "led_level": message.led_level,
        }
    if isinstance(message, Squeeze):
        return {
            "type": "squeeze",
            "t_ms": message.t_ms,
            "peak": message.peak,
            "duration_ms": message.duration_ms,
        }
    if isinstance(message, TrainingPrompt):
        return {"type": "training_prompt", "t_ms": message.t_ms}
    if isinstance(message, SessionEvent):
        return {
            "type": "session_event",
            "t_ms": message.t_ms,
            "kind": message.kind.name.lower(),
            "step": message.step,
            "phase": message.phase.name.lower(),
        }
    if isinstance(message, SilentMode):
        return {"type": "silent_mode", "t_ms": message.t_ms, "on": message.on}
    if isinstance(message, Command):
        return {"type": "command", "cmd": message.cmd.name.lower()}
    if isinstance(message, HistoryRequest):
        return {
            "type": "history_request",
            "from_ms": message.from_ms,
            "to_ms": message.to_ms,
        }
    if isinstance(message, HistoryResponse):
        return {
            "type": "history_response",
            "count": message.count,
            "records": [
                {"t_ms": r.t_ms, "kind": r.kind.label, "value": r.value}
                for r in message.records
            ],
        }
    raise ProtocolError(f"not a protocol message: {message!r}")


def message_to_json(message: Message) -> str:
    return json.dumps(message_to_dict(message), separators=(",", ":"))


def message_from_dict(obj: dict) -> Message:
    """Inverse of message_to_dict; raises ValueError on malformed input."""
    if not isinstance(obj, dict):
        raise ValueError("message must be a JSON object")
    msg_type = obj.get("type")
    try:
        if msg_type == "level_update":
            return LevelUpdate(
                int(obj["t_ms"]), int(obj["accumulator"]), int(obj["led_level"])
            )
        if msg_type == "squeeze":
            return Squeeze(int(obj["t_ms"]), int(obj["peak"]), int(obj["duration_ms"]))
        if msg_type == "training_prompt":
            return TrainingPrompt(int(obj["t_ms"]))
        if msg_type == "session_event":
            return SessionEvent(
                int(obj["t_ms"]),
                SessionEventKind[str(obj["kind"]).upper()],
                int(obj["step"]),
                Phase[str(obj["phase"]).upper()],
            )
        if msg_type == "silent_mode":
            return SilentMode(int(obj["t_ms"]), bool(obj["on"]))
        if msg_type == "command":
            return Command(CommandKind[str(obj["cmd"]).upper()])
        if msg_type == "history_request":
            return HistoryRequest(int(obj["from_ms"]), int(obj["to_ms"]))
        if msg_type == "history_response":
            records = tuple(
                HistoryRecord(
                    int(r["t_ms"]),
                    RecordKind[str(r["kind"]).upper()],
                    int(r["value"]),
                )
                for r in obj["records"]
            )
            response = HistoryResponse(records)
            if "count" in obj and int(obj["count"]) != response.count:
                raise ValueError("history_response count mismatch")
            return response
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed {msg_type} message: {exc}") from None
    raise ValueError(f"unknown message type {msg_type!r}")


def message_from_json(text: str) -> Message:
    return message_from_dict(json.loads(text))


def split_history_response(
    records: list[HistoryRecord],
) -> list[HistoryResponse]:
    """Chunk records into responses that each fit one frame.

    Always yields at least one response so an empty result is still
    answered.
    """
    if not records:
        return [HistoryResponse(())]
    return [
        HistoryResponse(tuple(records[i : i + MAX_RESPONSE_RECORDS]))
        for i in range(0, len(records), MAX_RESPONSE_RECORDS)
    ]
