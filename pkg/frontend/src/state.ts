// App state is a pure mirror of the device: it changes only when a
// device-originated message arrives, never when the user clicks. The
// reducer is a plain function so tests can drive it headlessly with a
// recorded simulator log.

import {
    DeviceMessage,
    HistoryRecord,
    Phase,
    SessionEvent,
} from "./messages.js";
import { planStep } from "./plan.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export type DeviceMode = "sensing" | "training_prompt" | "training";

export interface SessionView {
    stepIndex: number;
    muscleGroup: string;
    instruction: string;
    phase: Phase;
    phaseStartedMs: number;
}

export interface GaugeView {
    accumulator: number;
    ledLevel: number;
}

export interface HistoryView {
    records: HistoryRecord[];
    range: { fromMs: number; toMs: number } | null;
    loading: boolean;
}

export interface AppState {
    connection: ConnectionStatus;
    gauge: GaugeView;
    mode: DeviceMode;
    silent: boolean;
    session: SessionView | null;
    lastSqueezePeak: number | null;
    lastEventMs: number;
    history: HistoryView;
}

export function initialAppState(): AppState {
    return {
        connection: "connecting",
        gauge: { accumulator: 0, ledLevel: 0 },
        mode: "sensing",
        silent: false,
        session: null,
        lastSqueezePeak: null,
        lastEventMs: 0,
        history: { records: [], range: null, loading: false },
    };
}

function sessionFromEvent(event: SessionEvent): SessionView {
    const step = planStep(event.step);
    return {
        stepIndex: event.step,
        muscleGroup: step.muscleGroup,
        instruction: step.instruction,
        phase: event.phase,
        phaseStartedMs: event.t_ms,
    };
}

export function applyMessage(state: AppState, message: DeviceMessage): AppState {
    const stamped =
        "t_ms" in message ? Math.max(state.lastEventMs, message.t_ms) : state.lastEventMs;
    switch (message.type) {
        case "level_update":
            return {
                ...state,
                gauge: { accumulator: message.accumulator, ledLevel: message.led_level },
                lastEventMs: stamped,
            };
        case "squeeze":
            return { ...state, lastSqueezePeak: message.peak, lastEventMs: stamped };
        case "training_prompt":
            return { ...state, mode: "training_prompt", lastEventMs: stamped };
        case "session_event":
            switch (message.kind) {
                case "started":
                case "step_advanced":
                case "phase_changed":
                    return {
                        ...state,
                        mode: "training",
                        session: sessionFromEvent(message),
                        lastEventMs: stamped,
                    };
                case "completed":
                case "cancelled":
                    return { ...state, mode: "sensing", session: null, lastEventMs: stamped };
            }
            return state;
        case "silent_mode":
            return { ...state, silent: message.on, lastEventMs: stamped };
        case "history_response":
            return {
                ...state,
                history: {
                    ...state.history,
                    records: state.history.records.concat(message.records),
                    loading: false,
                },
            };
    }
}

export function setConnection(state: AppState, status: ConnectionStatus): AppState {
    return { ...state, connection: status };
}

export function startHistoryQuery(
    state: AppState, fromMs: number, toMs: number
): AppState {
    // Long responses arrive as several chunks; a new query resets the pile.
    return {
        ...state,
        history: { records: [], range: { fromMs, toMs }, loading: true },
    };
}

/** Remaining fraction of the current phase, in [0, 1]; 0 when idle. */
export function countdownFraction(state: AppState, nowMs: number): number {
    if (state.session === null) return 0;
    const step = planStep(state.session.stepIndex);
    const duration = state.session.phase === "tense" ? step.tenseMs : step.relaxMs;
    const elapsed = nowMs - state.session.phaseStartedMs;
    return Math.min(1, Math.max(0, 1 - elapsed / duration));
}
