// The app and device must agree on the wire JSON byte for byte. The
// repo's published vectors.txt pairs every frame with its canonical
// JSON, so it doubles as the contract fixture here.

import { readFileSync } from "node:fs";
import { describe, expect, test } from "vitest";

import { commandJson, historyRequestJson, parseDeviceMessage } from "../src/messages.js";

const DEVICE_TYPES = new Set([
    "level_update",
    "squeeze",
    "training_prompt",
    "session_event",
    "silent_mode",
    "history_response",
]);

function vectorJsonLines(): string[] {
    const path = new URL("../../vectors.txt", import.meta.url);
    return readFileSync(path, "utf-8")
        .split("\n")
        .filter((line) => line.length > 0 && !line.startsWith("#"))
        .map((line) => line.slice(line.indexOf(" ") + 1));
}

describe("canonical JSON contract (vectors.txt)", () => {
    test("every device-originated vector parses", () => {
        let seen = 0;
        for (const json of vectorJsonLines()) {
            const type = (JSON.parse(json) as { type: string }).type;
            const parsed = parseDeviceMessage(json);
            if (DEVICE_TYPES.has(type)) {
                expect(parsed, json).not.toBeNull();
                expect(parsed!.type).toBe(type);
                seen += 1;
            } else {
                expect(parsed).toBeNull(); // client-only types are not mirrored
            }
        }
        expect(seen).toBeGreaterThanOrEqual(9);
    });

    test("outgoing command JSON matches the published canonical form", () => {
        const vectors = vectorJsonLines();
        expect(vectors).toContain(commandJson("start_training"));
        expect(vectors).toContain(commandJson("cancel_training"));
        expect(vectors).toContain(commandJson("toggle_silent"));
    });

    test("outgoing history request matches the canonical field order", () => {
        expect(historyRequestJson(0, 86_400_000)).toBe(
            '{"type":"history_request","from_ms":0,"to_ms":86400000}'
        );
    });
});

describe("parser robustness", () => {
    test("rejects non-JSON, non-objects, and unknown types", () => {
        expect(parseDeviceMessage("not json")).toBeNull();
        expect(parseDeviceMessage("42")).toBeNull();
        expect(parseDeviceMessage('"level_update"')).toBeNull();
        expect(parseDeviceMessage('{"type":"reboot"}')).toBeNull();
        expect(parseDeviceMessage('{"no_type":1}')).toBeNull();
    });

    test("accepts a live level update", () => {
        const message = parseDeviceMessage(
            '{"type":"level_update","t_ms":12,"accumulator":340,"led_level":2}'
        );
        expect(message).toEqual({
            type: "level_update",
            t_ms: 12,
            accumulator: 340,
            led_level: 2,
        });
    });
});
