// Wire vocabulary: the canonical JSON the simulator speaks over its
// WebSocket mirror and writes to event logs, one object per message.

export type SessionEventKind =
    | "started"
    | "step_advanced"
    | "phase_changed"
    | "completed"
    | "cancelled";

export type Phase = "tense" | "relax";

export type CommandName = "start_training" | "cancel_training" | "toggle_silent";

export interface LevelUpdate {
    type: "level_update";
    t_ms: number;
    accumulator: number;
    led_level: number;
}

export interface Squeeze {
    type: "squeeze";
    t_ms: number;
    peak: number;
    duration_ms: number;
}

export interface TrainingPrompt {
    type: "training_prompt";
    t_ms: number;
}

export interface SessionEvent {
    type: "session_event";
    t_ms: number;
    kind: SessionEventKind;
    step: number;
    phase: Phase;
}

export interface SilentMode {
    type: "silent_mode";
    t_ms: number;
    on: boolean;
}

export interface HistoryRecord {
    t_ms: number;
    kind: string;
    value: number;
}

export interface HistoryResponse {
    type: "history_response";
    count: number;
    records: HistoryRecord[];
}

export type DeviceMessage =
    | LevelUpdate
    | Squeeze
    | TrainingPrompt
    | SessionEvent
    | SilentMode
    | HistoryResponse;

export interface Command {
    type: "command";
    cmd: CommandName;
}

export interface HistoryRequest {
    type: "history_request";
    from_ms: number;
    to_ms: number;
}

export type ClientMessage = Command | HistoryRequest;

const DEVICE_TYPES = new Set([
    "level_update",
    "squeeze",
    "training_prompt",
    "session_event",
    "silent_mode",
    "history_response",
]);

/** Parse one mirror message; null for anything unknown or malformed. */
export function parseDeviceMessage(text: string): DeviceMessage | null {
    let obj: unknown;
    try {
        obj = JSON.parse(text);
    } catch {
        return null;
    }
    if (typeof obj !== "object" || obj === null) return null;
    const message = obj as { type?: unknown };
    if (typeof message.type !== "string" || !DEVICE_TYPES.has(message.type)) {
        return null;
    }
    return message as DeviceMessage;
}

export function commandJson(cmd: CommandName): string {
    return JSON.stringify({ type: "command", cmd });
}

export function historyRequestJson(fromMs: number, toMs: number): string {
    return JSON.stringify({ type: "history_request", from_ms: fromMs, to_ms: toMs });
}
