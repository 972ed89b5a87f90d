"""Progressive muscle relaxation session engine.

A plan is an ordered list of muscle-group steps, each with a timed tense
phase followed by a timed relax phase. A session walks the plan on a
millisecond clock; boundary crossings are stamped with their exact
analytic times so logs do not depend on how coarsely the host ticks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

MAX_INSTRUCTION_CHARS = 32


class PlanError(ValueError):
    """A plan file or plan value is invalid."""


class EmptyPlanError(PlanError):
    """Plan contains no steps."""


class BadDurationError(PlanError):
    """A tense or relax duration is not a positive integer."""


class OversizeInstructionError(PlanError):
    """An instruction does not fit the 32-character display line."""


class Phase(enum.IntEnum):
    TENSE = 0
    RELAX = 1


@dataclass(frozen=True, slots=True)
class PmrStep:
    muscle_group: str
    instruction: str
    tense_ms: int
    relax_ms: int

    def __post_init__(self) -> None:
        if self.tense_ms <= 0 or self.relax_ms <= 0:
            raise BadDurationError(
                f"step {self.muscle_group!r}: durations must be > 0 ms"
            )
        if not self.instruction:
            raise PlanError(f"step {self.muscle_group!r}: instruction is empty")
        if len(self.instruction) > MAX_INSTRUCTION_CHARS:
            raise OversizeInstructionError(
                f"step {self.muscle_group!r}: instruction exceeds "
                f"{MAX_INSTRUCTION_CHARS} characters"
            )

    @property
    def duration_ms(self) -> int:
        return self.tense_ms + self.relax_ms


@dataclass(frozen=True, slots=True)
class PmrPlan:
    name: str
    steps: tuple[PmrStep, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise EmptyPlanError("plan has no steps")

    @property
    def total_duration_ms(self) -> int:
        return sum(s.duration_ms for s in self.steps)


@dataclass(frozen=True, slots=True)
class PmrSession:
    plan: PmrPlan
    started_ms: int
    step_index: int
    phase: Phase
    phase_started_ms: int

    @property
    def current_step(self) -> PmrStep:
        return self.plan.steps[self.step_index]

    @property
    def instruction_text(self) -> str:
        return self.current_step.instruction

    @property
    def phase_duration_ms(self) -> int:
        step = self.current_step
        return step.tense_ms if self.phase is Phase.TENSE else step.relax_ms


# Boundary events emitted by advance(). Timestamps are the exact analytic
# boundary times, which may be earlier than the now_ms that exposed them.


@dataclass(frozen=True, slots=True)
class PhaseChanged:
    t_ms: int
    step_index: int
    phase: Phase


@dataclass(frozen=True, slots=True)
class StepAdvanced:
    t_ms: int
    step_index: int


@dataclass(frozen=True, slots=True)
class SessionCompleted:
    t_ms: int


BoundaryEvent = PhaseChanged | StepAdvanced | SessionCompleted

# Built-in seven-group routine, in the plan file format so the parser is
# the single source of truth for it.
DEFAULT_PLAN_TEXT = """\
name: Seven-group quick routine
# muscle_group | instruction | tense_ms | relax_ms
hands      | Clench your fists          | 5000 | 10000
upper arms | Tense your upper arms      | 5000 | 10000
face       | Scrunch your face          | 5000 | 10000
shoulders  | Raise your shoulders       | 5000 | 10000
torso      | Tighten chest and stomach  | 5000 | 10000
legs       | Tense your thighs          | 5000 | 10000
feet       | Curl your toes             | 5000 | 10000
"""


def load_plan(data: bytes) -> PmrPlan:
    """Parse a plan file.

    One step per line: ``muscle_group | instruction | tense_ms | relax_ms``.
    Blank lines and ``#`` comments are ignored; an optional leading
    ``name: <text>`` line names the plan.
    """
    text = data.decode("utf-8")
    name = ""
    steps: list[PmrStep] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not steps and not name and line.startswith("name:"):
            name = line[len("name:"):].strip()
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) != 4:
            raise PlanError(f"line {lineno}: expected 4 '|'-separated fields")
        group, instruction, tense_text, relax_text = fields
        try:
            tense_ms = int(tense_text)
            relax_ms = int(relax_text)
        except ValueError:
            raise BadDurationError(f"line {lineno}: durations must be integers") from None
        if tense_ms <= 0 or relax_ms <= 0:
            raise BadDurationError(f"line {lineno}: durations must be > 0 ms")
        if not instruction:
            raise PlanError(f"line {lineno}: instruction is empty")
        if len(instruction) > MAX_INSTRUCTION_CHARS:
            raise OversizeInstructionError(
                f"line {lineno}: instruction exceeds {MAX_INSTRUCTION_CHARS} characters"
            )
        steps.append(PmrStep(group, instruction, tense_ms, relax_ms))
    if not steps:
        raise EmptyPlanError("plan has no steps")
    return PmrPlan(name=name, steps=tuple(steps))


def default_plan() -> PmrPlan:
    return load_plan(DEFAULT_PLAN_TEXT.encode("utf-8"))


def start_session(plan: PmrPlan, now_ms: int) -> PmrSession:
    """Begin a session at step 0 in the tense phase."""
    return PmrSession(
        plan=plan,
        started_ms=now_ms,
        step_index=0,
        phase=Phase.TENSE,
        phase_started_ms=now_ms,
    )


def advance(
    session: PmrSession, now_ms: int
) -> tuple[PmrSession | None, list[BoundaryEvent]]:
    """Move the session forward to now_ms, crossing any phase boundaries.

    Returns the updated session (or None once the plan is finished) plus
    the boundary events crossed, in order, stamped at their exact times.
    A boundary is crossed the instant now_ms reaches it, so calling again
    with the same now_ms is a no-op.
    """
    if now_ms < session.phase_started_ms:
        raise ValueError("now_ms precedes the current phase")
    events: list[BoundaryEvent] = []
    current: PmrSession | None = session
    while current is not None:
        boundary = current.phase_started_ms + current.phase_duration_ms
        if now_ms < boundary:
            break
        if current.phase is Phase.TENSE:
            current = PmrSession(
                plan=current.plan,
                started_ms=current.started_ms,
                step_index=current.step_index,
                phase=Phase.RELAX,
                phase_started_ms=boundary,
            )
            events.append(PhaseChanged(boundary, current.step_index, Phase.RELAX))
        elif current.step_index + 1 < len(current.plan.steps):
            current = PmrSession(
                plan=current.plan,
                started_ms=current.started_ms,
                step_index=current.step_index + 1,
                phase=Phase.TENSE,
                phase_started_ms=boundary,
            )
            events.append(StepAdvanced(boundary, current.step_index))
        else:
            events.append(SessionCompleted(boundary))
            current = None
    return current, events


def countdown_brightness(session: PmrSession, now_ms: int) -> int:
    """LED brightness for the running phase: 255 at start, 0 at the end."""
    duration = session.phase_duration_ms
    remaining = session.phase_started_ms + duration - now_ms
    remaining = max(0, min(duration, remaining))
    return 255 * remaining // duration


def led_pattern(session: PmrSession, now_ms: int, led_count: int) -> list[int]:
    """Row of LED brightness values showing session progress.

    Completed steps are fully lit, the current step fades with the phase
    countdown, upcoming steps are dark. Plans longer than the row wrap
    around with the completed marks cleared at each wrap.
    """
    position = session.step_index % led_count
    pattern = [0] * led_count
    for i in range(position):
        pattern[i] = 255
    pattern[position] = countdown_brightness(session, now_ms)
    return pattern
