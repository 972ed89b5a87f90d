"""Replay harness: drives the device on a virtual clock.

The clock advances in tick_ms steps from zero. At each tick the harness
delivers, in a fixed order, any scripted button presses that have come
due, any commands injected by connected clients, the zero-order-hold
pressure sample (latest trace sample at or before the tick), and finally
the tick itself. Every device output is serialized to the event log as
one canonical-JSON line; history records are also appended to the store
and protocol messages handed to an optional broadcast hook.

Identical inputs therefore produce byte-identical logs; wall-clock speed
only paces the loop and never changes its output.
"""

from __future__ import annotations

import json
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .config import SimConfig
from .device import (
    AppCommand,
    Button,
    ButtonKind,
    DeviceState,
    Event,
    LcdText,
    LedFrame,
    Mode,
    Output,
    PressureSample,
    Sample,
    Tick,
    initial_state,
    step,
)
from .history import HistoryRecord, HistoryStore
from .protocol import LevelUpdate, CommandKind, Message, message_to_json


class ScriptError(ValueError):
    """A script file is malformed; line_no locates the problem."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


_ACTIONS = {
    "start": ButtonKind.START,
    "cancel": ButtonKind.CANCEL,
    "silent": ButtonKind.SILENT,
}


def parse_script(text: str) -> list[tuple[int, ButtonKind]]:
    """Parse ``t_ms,action`` lines; actions are start, cancel, silent."""
    entries: list[tuple[int, ButtonKind]] = []
    last_t = -1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ScriptError(line_no, "expected 't_ms,action'")
        try:
            t_ms = int(parts[0])
        except ValueError:
            raise ScriptError(line_no, "non-integer t_ms") from None
        action = _ACTIONS.get(parts[1])
        if action is None:
            raise ScriptError(line_no, f"unknown action {parts[1]!r}")
        if t_ms < last_t:
            raise ScriptError(line_no, "t_ms goes backwards")
        entries.append((t_ms, action))
        last_t = t_ms
    return entries


def serialize_output(output: Output, t_ms: int) -> str:
    """One canonical-JSON log line for a device output."""
    if isinstance(output, LedFrame):
        obj = {
            "type": "led_frame",
            "t_ms": t_ms,
            "white": list(output.white),
            "blue": output.blue,
        }
    elif isinstance(output, LcdText):
        obj = {"type": "lcd_text", "t_ms": t_ms, "line": output.line}
    elif isinstance(output, HistoryRecord):
        obj = {
            "type": "history_record",
            "t_ms": output.t_ms,
            "kind": output.kind.label,
            "value": output.value,
        }
    else:
        return message_to_json(output)
    return json.dumps(obj, separators=(",", ":"))


@dataclass
class SimRun:
    config: SimConfig
    trace: list[PressureSample]
    script: list[tuple[int, ButtonKind]] = field(default_factory=list)
    speed: float = 0.0  # real-time multiplier; 0 = as fast as possible

    def __post_init__(self) -> None:
        if self.speed < 0:
            raise ValueError("speed must be >= 0")


class Simulation:
    """Owns the device state and routes its outputs.

    All mutation happens through step_tick(), which the host must call
    from a single loop; injected commands are queued and applied at the
    next tick.
    """

    def __init__(
        self,
        config: SimConfig,
        trace: list[PressureSample],
        script: list[tuple[int, ButtonKind]] | None = None,
        on_message: Callable[[Message], None] | None = None,
        on_line: Callable[[str], None] | None = None,
        keep_log: bool = True,
    ):
        self.config = config.device
        self.state: DeviceState = initial_state(self.config)
        self.history = HistoryStore(config.history_path)
        self.log_lines: list[str] = []
        self.on_message = on_message
        self.on_line = on_line
        self.keep_log = keep_log
        self._trace = trace
        self._trace_index = 0
        self._held: PressureSample | None = None
        self._script = sorted(script or [], key=lambda e: e[0])
        self._script_index = 0
        self._commands: deque[CommandKind] = deque()
        self._booted = False

    @property
    def mode(self) -> Mode:
        return self.state.mode

    def boot(self) -> None:
        """Announce the initial level so clients can sync their gauges."""
        if self._booted:
            return
        self._booted = True
        self._route(LevelUpdate(0, self.state.accumulator, 0), 0)

    def inject_command(self, command: CommandKind) -> None:
        """Queue an app command for the next tick."""
        self._commands.append(command)

    def input_end_ms(self) -> int:
        """Last timestamp carried by the trace or script."""
        end = 0
        if self._trace:
            end = self._trace[-1].t_ms
        if self._script:
            end = max(end, self._script[-1][0])
        return end

    def step_tick(self, t_ms: int) -> None:
        if not self._booted:
            self.boot()
        while (
            self._script_index < len(self._script)
            and self._script[self._script_index][0] <= t_ms
        ):
            _, button = self._script[self._script_index]
            self._script_index += 1
            self._apply(Button(t_ms, button))
        while self._commands:
            self._apply(AppCommand(t_ms, self._commands.popleft()))
        while (
            self._trace_index < len(self._trace)
            and self._trace[self._trace_index].t_ms <= t_ms
        ):
            self._held = self._trace[self._trace_index]
            self._trace_index += 1
        if self._held is not None:
            self._apply(Sample(PressureSample(t_ms, self._held.pressure)))
        self._apply(Tick(t_ms))

    def _apply(self, event: Event) -> None:
        self.state, outputs = step(self.state, event, self.config)
        for output in outputs:
            self._route(output, event.t_ms)

    def _route(self, output: Output, t_ms: int) -> None:
        line = serialize_output(output, t_ms)
        if self.keep_log:
            self.log_lines.append(line)
        if self.on_line is not None:
            self.on_line(line)
        if isinstance(output, HistoryRecord):
            self.history.append(output)
        elif self.on_message is not None and not isinstance(
            output, (LedFrame, LcdText)
        ):
            self.on_message(output)

    def close(self) -> None:
        self.history.close()


@dataclass
class RunResult:
    log_lines: list[str]
    state: DeviceState
    history: HistoryStore


def run(sim_run: SimRun, on_message: Callable[[Message], None] | None = None) -> RunResult:
    """Replay a trace (plus optional script) to completion.

    Ticks cover every input timestamp and keep going while a session is
    in progress, so completions always land in the log. A device left in
    the training prompt simply ends there.
    """
    sim = Simulation(
        sim_run.config, sim_run.trace, sim_run.script, on_message=on_message
    )
    tick_ms = sim.config.tick_ms
    end = sim.input_end_ms()
    stop = ((end + tick_ms - 1) // tick_ms) * tick_ms
    sim.boot()
    t = 0
    wall_start = time.monotonic()
    while True:
        sim.step_tick(t)
        if t >= stop and sim.mode is not Mode.TRAINING:
            break
        t += tick_ms
        if sim_run.speed > 0:
            target = wall_start + (t / 1000.0) / sim_run.speed
            delay = target - time.monotonic()
            if delay > 0:
                time.sleep(delay)
    sim.close()
    return RunResult(sim.log_lines, sim.state, sim.history)


def write_log(path, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line)
            f.write("\n")
