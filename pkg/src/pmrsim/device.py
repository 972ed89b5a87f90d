"""Squeeze-ball device core: a pure, deterministic state machine.

The device idles in sensing mode, detecting squeezes on the pressure
stream with a two-threshold hysteresis detector. Each completed squeeze
bumps the anxiety accumulator; when the gauge fills, the device prompts
for a relaxation session (all LEDs lit, prompt line on the LCD). An
explicit start begins the guided session; completing it drains the gauge
to zero, cancelling resets it to a configurable fraction. A silent flag,
shown as the blue LED, can be toggled at any time and touches nothing
else.

step() is a total function from (state, event, config) to (state,
outputs) with no hidden inputs, so replaying an event sequence always
reproduces the same outputs byte for byte. Outputs carry protocol
messages and history records first (in causal order), then LED/LCD
render updates; render updates are emitted only when they change.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from . import pmr
from .history import HistoryRecord, RecordKind
from .pmr import Phase, PmrPlan, PmrSession
from .protocol import (
    CommandKind,
    LevelUpdate,
    Message,
    SessionEvent,
    SessionEventKind,
    SilentMode,
    Squeeze,
    TrainingPrompt,
)

ADC_MAX = 1023
LCD_WIDTH = 32
PROMPT_LINE = "Start PMR training"


class ConfigError(ValueError):
    """Device configuration violates an invariant."""


@dataclass(frozen=True, slots=True)
class PressureSample:
    t_ms: int
    pressure: int

    def __post_init__(self) -> None:
        if self.t_ms < 0:
            raise ValueError("t_ms must be >= 0")
        if not 0 <= self.pressure <= ADC_MAX:
            raise ValueError(f"pressure must be in [0, {ADC_MAX}]")


@dataclass(frozen=True, slots=True)
class DeviceConfig:
    p_hi: int = 300
    p_lo: int = 150
    a_max: int = 1000
    delta_min: int = 10
    delta_max: int = 100
    led_count: int = 8
    tick_ms: int = 10
    decay_half_life_ms: int = 0
    cancel_reset_fraction: float = 0.5
    plan: PmrPlan = field(default_factory=pmr.default_plan)

    def __post_init__(self) -> None:
        if not 0 <= self.p_lo < self.p_hi <= ADC_MAX:
            raise ConfigError("thresholds must satisfy 0 <= p_lo < p_hi <= 1023")
        if not 0 < self.delta_min <= self.delta_max <= self.a_max:
            raise ConfigError("need 0 < delta_min <= delta_max <= a_max")
        if self.a_max > 0xFFFF:
            raise ConfigError("a_max must fit the wire's u16 level field")
        if not 1 <= self.led_count <= 255:
            raise ConfigError("led_count must be in [1, 255]")
        if self.tick_ms < 1:
            raise ConfigError("tick_ms must be >= 1")
        if self.decay_half_life_ms < 0:
            raise ConfigError("decay_half_life_ms must be >= 0")
        if not 0.0 <= self.cancel_reset_fraction <= 1.0:
            raise ConfigError("cancel_reset_fraction must be in [0, 1]")


@dataclass(frozen=True, slots=True)
class SqueezeDetected:
    t_ms: int  # release time
    peak: int
    duration_ms: int


class DetectorPhase(enum.Enum):
    IDLE = "idle"
    IN_SQUEEZE = "in_squeeze"


@dataclass(frozen=True, slots=True)
class DetectorState:
    phase: DetectorPhase
    peak: int
    started_ms: int


DETECTOR_IDLE = DetectorState(DetectorPhase.IDLE, 0, 0)


def detect_squeeze(
    detector: DetectorState, sample: PressureSample, config: DeviceConfig
) -> tuple[DetectorState, SqueezeDetected | None]:
    """Hysteresis squeeze detector.

    Arms when pressure rises to p_hi, tracks the running peak, and emits
    one event when pressure falls back to p_lo. Nothing is emitted
    mid-squeeze, and chatter between the thresholds cannot retrigger.
    """
    if detector.phase is DetectorPhase.IDLE:
        if sample.pressure >= config.p_hi:
            return (
                DetectorState(DetectorPhase.IN_SQUEEZE, sample.pressure, sample.t_ms),
                None,
            )
        return detector, None
    peak = max(detector.peak, sample.pressure)
    if sample.pressure <= config.p_lo:
        event = SqueezeDetected(
            t_ms=sample.t_ms,
            peak=peak,
            duration_ms=sample.t_ms - detector.started_ms,
        )
        return DETECTOR_IDLE, event
    return DetectorState(DetectorPhase.IN_SQUEEZE, peak, detector.started_ms), None


def accumulate(accumulator: int, peak: int, config: DeviceConfig) -> int:
    """Add one squeeze to the gauge: linear in peak, clamped per squeeze."""
    # round(delta_max * peak / 1023) in exact integer arithmetic
    scaled = (2 * config.delta_max * peak + ADC_MAX) // (2 * ADC_MAX)
    delta = max(config.delta_min, min(config.delta_max, scaled))
    return min(accumulator + delta, config.a_max)


def decay(accumulator: int, elapsed_ms: int, config: DeviceConfig) -> int:
    """Exponential decay by half-life; disabled when the half-life is 0."""
    if config.decay_half_life_ms == 0 or elapsed_ms <= 0 or accumulator == 0:
        return accumulator
    return math.floor(
        accumulator * 2.0 ** (-elapsed_ms / config.decay_half_life_ms)
    )


def led_level(accumulator: int, config: DeviceConfig) -> int:
    """Lit LED count for the gauge; all led_count only at a full gauge."""
    return config.led_count * accumulator // config.a_max


class Mode(enum.Enum):
    SENSING = "sensing"
    TRAINING_PROMPT = "training_prompt"
    TRAINING = "training"


@dataclass(frozen=True, slots=True)
class LedFrame:
    white: tuple[int, ...]
    blue: bool


@dataclass(frozen=True, slots=True)
class LcdText:
    line: str

    def __post_init__(self) -> None:
        if len(self.line) > LCD_WIDTH:
            raise ValueError(f"LCD line exceeds {LCD_WIDTH} characters")
        if not all(32 <= ord(c) <= 126 for c in self.line):
            raise ValueError("LCD line must be printable ASCII")


class ButtonKind(enum.Enum):
    SILENT = "silent"
    START = "start"
    CANCEL = "cancel"


@dataclass(frozen=True, slots=True)
class Tick:
    t_ms: int


@dataclass(frozen=True, slots=True)
class Sample:
    sample: PressureSample

    @property
    def t_ms(self) -> int:
        return self.sample.t_ms


@dataclass(frozen=True, slots=True)
class Button:
    t_ms: int
    button: ButtonKind


@dataclass(frozen=True, slots=True)
class AppCommand:
    t_ms: int
    command: CommandKind


Event = Tick | Sample | Button | AppCommand
Output = LedFrame | LcdText | Message | HistoryRecord


@dataclass(frozen=True, slots=True)
class DeviceState:
    mode: Mode
    accumulator: int
    silent: bool
    detector: DetectorState
    session: PmrSession | None
    last_tick_ms: int
    # Last rendered outputs, kept so step() only emits render changes.
    last_led: LedFrame
    last_lcd: str


def _render_at(state_like: DeviceState, config: DeviceConfig, now_ms: int) -> tuple[LedFrame, LcdText]:
    if state_like.mode is Mode.TRAINING:
        assert state_like.session is not None
        white = tuple(pmr.led_pattern(state_like.session, now_ms, config.led_count))
        line = state_like.session.instruction_text
    else:
        lit = led_level(state_like.accumulator, config)
        white = tuple(255 if i < lit else 0 for i in range(config.led_count))
        line = PROMPT_LINE if state_like.mode is Mode.TRAINING_PROMPT else ""
    safe = "".join(c if 32 <= ord(c) <= 126 else "?" for c in line)[:LCD_WIDTH]
    return LedFrame(white=white, blue=state_like.silent), LcdText(safe)


def render(state: DeviceState, config: DeviceConfig) -> tuple[LedFrame, LcdText]:
    """Current LED frame and LCD line for a state, at its last tick time."""
    return _render_at(state, config, state.last_tick_ms)


def initial_state(config: DeviceConfig) -> DeviceState:
    """Boot state: sensing, empty gauge, boot render already cached."""
    state = DeviceState(
        mode=Mode.SENSING,
        accumulator=0,
        silent=False,
        detector=DETECTOR_IDLE,
        session=None,
        last_tick_ms=0,
        last_led=LedFrame(white=(0,) * config.led_count, blue=False),
        last_lcd="",
    )
    led, lcd = _render_at(state, config, 0)
    return replace(state, last_led=led, last_lcd=lcd.line)


def _level_outputs(t_ms: int, accumulator: int, config: DeviceConfig) -> list[Output]:
    return [
        LevelUpdate(t_ms, accumulator, led_level(accumulator, config)),
        HistoryRecord(t_ms, RecordKind.LEVEL, accumulator),
    ]


def _on_sample(
    state: DeviceState, sample: PressureSample, config: DeviceConfig
) -> tuple[DeviceState, list[Output]]:
    if state.mode is not Mode.SENSING:
        return state, []
    detector, squeeze = detect_squeeze(state.detector, sample, config)
    state = replace(state, detector=detector)
    if squeeze is None:
        return state, []
    outputs: list[Output] = [
        Squeeze(squeeze.t_ms, squeeze.peak, min(squeeze.duration_ms, 0xFFFF)),
        HistoryRecord(squeeze.t_ms, RecordKind.SQUEEZE, squeeze.peak),
    ]
    accumulator = accumulate(state.accumulator, squeeze.peak, config)
    if accumulator != state.accumulator:
        outputs.extend(_level_outputs(squeeze.t_ms, accumulator, config))
    state = replace(state, accumulator=accumulator)
    if accumulator == config.a_max:
        state = replace(state, mode=Mode.TRAINING_PROMPT, detector=DETECTOR_IDLE)
        outputs.append(TrainingPrompt(squeeze.t_ms))
        outputs.append(HistoryRecord(squeeze.t_ms, RecordKind.PROMPT, 0))
    return state, outputs


def _session_event_outputs(
    boundary: pmr.BoundaryEvent, session: PmrSession
) -> list[Output]:
    if isinstance(boundary, pmr.PhaseChanged):
        return [
            SessionEvent(
                boundary.t_ms,
                SessionEventKind.PHASE_CHANGED,
                boundary.step_index,
                boundary.phase,
            )
        ]
    if isinstance(boundary, pmr.StepAdvanced):
        return [
            SessionEvent(
                boundary.t_ms,
                SessionEventKind.STEP_ADVANCED,
                boundary.step_index,
                Phase.TENSE,
            )
        ]
    assert isinstance(boundary, pmr.SessionCompleted)
    return [
        SessionEvent(
            boundary.t_ms,
            SessionEventKind.COMPLETED,
            len(session.plan.steps) - 1,
            Phase.RELAX,
        ),
        HistoryRecord(boundary.t_ms, RecordKind.SESSION_COMPLETED, 0),
    ]


def _on_tick(
    state: DeviceState, t_ms: int, config: DeviceConfig
) -> tuple[DeviceState, list[Output]]:
    outputs: list[Output] = []
    if state.mode is Mode.SENSING and config.decay_half_life_ms > 0:
        accumulator = decay(state.accumulator, t_ms - state.last_tick_ms, config)
        if accumulator != state.accumulator:
            outputs.extend(_level_outputs(t_ms, accumulator, config))
            state = replace(state, accumulator=accumulator)
    elif state.mode is Mode.TRAINING:
        assert state.session is not None
        session, boundaries = pmr.advance(state.session, t_ms)
        for boundary in boundaries:
            outputs.extend(_session_event_outputs(boundary, state.session))
        if session is None:
            # Session finished: drain the gauge, back to sensing. The
            # reset is stamped at the exact completion time.
            end_ms = state.session.started_ms + state.session.plan.total_duration_ms
            outputs.extend(_level_outputs(end_ms, 0, config))
            state = replace(
                state,
                mode=Mode.SENSING,
                session=None,
                accumulator=0,
                detector=DETECTOR_IDLE,
            )
        else:
            state = replace(state, session=session)
    return replace(state, last_tick_ms=t_ms), outputs


def _on_start(
    state: DeviceState, t_ms: int, config: DeviceConfig
) -> tuple[DeviceState, list[Output]]:
    if state.mode is not Mode.TRAINING_PROMPT:
        return state, []
    session = pmr.start_session(config.plan, t_ms)
    state = replace(state, mode=Mode.TRAINING, session=session)
    outputs: list[Output] = [
        SessionEvent(t_ms, SessionEventKind.STARTED, 0, Phase.TENSE),
        HistoryRecord(t_ms, RecordKind.SESSION_STARTED, 0),
    ]
    return state, outputs


def _on_cancel(
    state: DeviceState, t_ms: int, config: DeviceConfig
) -> tuple[DeviceState, list[Output]]:
    if state.mode is Mode.SENSING:
        return state, []
    outputs: list[Output] = []
    if state.mode is Mode.TRAINING:
        assert state.session is not None
        outputs.append(
            SessionEvent(
                t_ms,
                SessionEventKind.CANCELLED,
                state.session.step_index,
                state.session.phase,
            )
        )
        outputs.append(HistoryRecord(t_ms, RecordKind.SESSION_CANCELLED, 0))
    accumulator = math.floor(config.cancel_reset_fraction * config.a_max)
    if accumulator != state.accumulator:
        outputs.extend(_level_outputs(t_ms, accumulator, config))
    state = replace(
        state,
        mode=Mode.SENSING,
        session=None,
        accumulator=accumulator,
        detector=DETECTOR_IDLE,
    )
    return state, outputs


def _on_silent_toggle(state: DeviceState, t_ms: int) -> tuple[DeviceState, list[Output]]:
    silent = not state.silent
    state = replace(state, silent=silent)
    outputs: list[Output] = [
        SilentMode(t_ms, silent),
        HistoryRecord(
            t_ms, RecordKind.SILENT_ON if silent else RecordKind.SILENT_OFF, 0
        ),
    ]
    return state, outputs


def step(
    state: DeviceState, event: Event, config: DeviceConfig
) -> tuple[DeviceState, list[Output]]:
    """Apply one event; unexpected events in a mode are no-ops."""
    if isinstance(event, Tick):
        state2, outputs = _on_tick(state, event.t_ms, config)
    elif isinstance(event, Sample):
        state2, outputs = _on_sample(state, event.sample, config)
    elif isinstance(event, Button):
        if event.button is ButtonKind.SILENT:
            state2, outputs = _on_silent_toggle(state, event.t_ms)
        elif event.button is ButtonKind.START:
            state2, outputs = _on_start(state, event.t_ms, config)
        else:
            state2, outputs = _on_cancel(state, event.t_ms, config)
    elif isinstance(event, AppCommand):
        if event.command is CommandKind.TOGGLE_SILENT:
            state2, outputs = _on_silent_toggle(state, event.t_ms)
        elif event.command is CommandKind.START_TRAINING:
            state2, outputs = _on_start(state, event.t_ms, config)
        else:
            state2, outputs = _on_cancel(state, event.t_ms, config)
    else:
        raise TypeError(f"not a device event: {event!r}")

    led, lcd = _render_at(state2, config, event.t_ms)
    if led != state2.last_led:
        outputs.append(led)
        state2 = replace(state2, last_led=led)
    if lcd.line != state2.last_lcd:
        outputs.append(lcd)
        state2 = replace(state2, last_lcd=lcd.line)
    return state2, outputs
