// Browser entry point: DOM rendering over the headless controller.

import { dailyChart, levelsChart } from "./charts.js";
import { aggregateDaily } from "./history.js";
import { connectController, Controller } from "./controller.js";
import { countdownFraction } from "./state.js";
import { DEFAULT_PLAN } from "./plan.js";

const LED_COUNT = 8;
const DAY_MS = 86_400_000;

function byId<T extends HTMLElement>(id: string): T {
    const el = document.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el as T;
}

function wsUrl(): string {
    const params = new URLSearchParams(location.search);
    return params.get("ws") ?? "ws://127.0.0.1:8766";
}

function render(controller: Controller): void {
    const state = controller.state;
    const connected = state.connection === "connected";

    const banner = byId("banner");
    banner.hidden = connected;
    banner.textContent =
        state.connection === "connecting"
            ? "connecting to the device…"
            : "device disconnected — retrying";

    const segments = byId("gauge").children;
    for (let i = 0; i < segments.length; i++) {
        segments[i].classList.toggle("lit", i < state.gauge.ledLevel);
    }
    byId("gauge-text").textContent =
        `level ${state.gauge.accumulator} · ${state.gauge.ledLevel}/${LED_COUNT} lights`;

    byId("mode").textContent = state.mode.replace("_", " ");
    byId("silent-dot").classList.toggle("on", state.silent);
    byId("prompt").hidden = state.mode !== "training_prompt";

    const session = byId("session");
    if (state.session) {
        session.hidden = false;
        byId("session-step").textContent =
            `Step ${state.session.stepIndex + 1} of ${DEFAULT_PLAN.length} — ${state.session.muscleGroup}`;
        byId("session-instruction").textContent = state.session.instruction;
        byId("session-phase").textContent = state.session.phase;
    } else {
        session.hidden = true;
    }

    (byId("btn-start") as HTMLButtonElement).disabled =
        !connected || state.mode !== "training_prompt";
    (byId("btn-cancel") as HTMLButtonElement).disabled =
        !connected || state.mode === "sensing";
    (byId("btn-silent") as HTMLButtonElement).disabled = !connected;
    (byId("btn-history-all") as HTMLButtonElement).disabled = !connected;
    (byId("btn-history-day") as HTMLButtonElement).disabled = !connected;

    const records = state.history.records;
    if (state.history.range !== null && !state.history.loading) {
        byId("levels-chart").innerHTML = levelsChart(records).svg;
        byId("daily-chart").innerHTML = dailyChart(aggregateDaily(records)).svg;
        byId("history-note").textContent = `${records.length} records`;
    } else if (state.history.loading) {
        byId("history-note").textContent = "loading…";
    }
}

function animateCountdown(controller: Controller): void {
    const bar = byId("countdown-bar");
    const label = byId("countdown-text");
    const tick = () => {
        const state = controller.state;
        if (state.session) {
            const fraction = countdownFraction(state, controller.deviceNowMs());
            bar.style.width = `${(fraction * 100).toFixed(1)}%`;
            const step = DEFAULT_PLAN[state.session.stepIndex % DEFAULT_PLAN.length];
            const total = state.session.phase === "tense" ? step.tenseMs : step.relaxMs;
            label.textContent = `${Math.ceil((fraction * total) / 1000)} s`;
        }
        requestAnimationFrame(tick);
    };
    requestAnimationFrame(tick);
}

function main(): void {
    const { controller } = connectController(wsUrl());
    controller.subscribe(() => render(controller));

    byId("btn-start").onclick = () => controller.sendCommand("start_training");
    byId("btn-cancel").onclick = () => controller.sendCommand("cancel_training");
    byId("btn-silent").onclick = () => controller.sendCommand("toggle_silent");
    byId("btn-history-all").onclick = () =>
        controller.requestHistory(0, Number.MAX_SAFE_INTEGER);
    byId("btn-history-day").onclick = () => {
        const now = controller.deviceNowMs();
        controller.requestHistory(Math.max(0, now - DAY_MS), now + 1);
    };

    animateCountdown(controller);
}

main();
