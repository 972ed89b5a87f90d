import { readFileSync } from "node:fs";

import { DeviceMessage, parseDeviceMessage } from "../src/messages.js";
import { AppState, applyMessage, initialAppState } from "../src/state.js";

export interface LogLine {
    type: string;
    [key: string]: unknown;
}

export function loadLogLines(name: string): LogLine[] {
    const path = new URL(`./fixtures/${name}`, import.meta.url);
    return readFileSync(path, "utf-8")
        .split("\n")
        .filter((line) => line.length > 0)
        .map((line) => JSON.parse(line) as LogLine);
}

/** Replay a recorded log the way the WS mirror would deliver it: only
 * protocol messages reach the app; render/history lines are filtered by
 * the same parser the live socket uses. */
export function replayLog(lines: LogLine[]): AppState {
    let state = initialAppState();
    for (const line of lines) {
        const message = parseDeviceMessage(JSON.stringify(line));
        if (message !== null) {
            state = applyMessage(state, message);
        }
    }
    return state;
}

export function lastOfType(lines: LogLine[], type: string): LogLine | undefined {
    for (let i = lines.length - 1; i >= 0; i--) {
        if (lines[i].type === type) return lines[i];
    }
    return undefined;
}

/** Ground truth from the device's own render outputs. */
export function deviceTruth(lines: LogLine[]) {
    const frame = lastOfType(lines, "led_frame") as
        | { white: number[]; blue: boolean }
        | undefined;
    const lcd = lastOfType(lines, "lcd_text") as { line: string } | undefined;
    const level = lastOfType(lines, "level_update") as
        | { accumulator: number; led_level: number }
        | undefined;
    const lcdLine = lcd?.line ?? "";
    const mode =
        lcdLine === ""
            ? "sensing"
            : lcdLine === "Start PMR training"
                ? "training_prompt"
                : "training";
    return {
        litCount: frame ? frame.white.filter((w) => w === 255).length : 0,
        blue: frame?.blue ?? false,
        mode,
        lcdLine,
        accumulator: level?.accumulator ?? 0,
        ledLevel: level?.led_level ?? 0,
    };
}

export function loadStoreFixture(name: string): {
    request: { from_ms: number; to_ms: number };
    response: { type: string; count: number; records: { t_ms: number; kind: string; value: number }[] };
    expected_count: number;
    expected_daily: {
        day: string;
        mean_level: number;
        max_level: number;
        squeeze_count: number;
        sessions_completed: number;
    }[];
} {
    const path = new URL(`./fixtures/${name}`, import.meta.url);
    return JSON.parse(readFileSync(path, "utf-8"));
}

export type { DeviceMessage };
