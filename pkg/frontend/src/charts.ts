// Hand-rolled SVG charts. Builders return markup plus the number of
// data marks they drew, so tests can assert cardinality without a DOM:
// every record in a response becomes exactly one mark on the timeline.

import { DailyAggregate } from "./history.js";
import { HistoryRecord } from "./messages.js";

export interface Chart {
    svg: string;
    marks: number;
}

const WIDTH = 640;
const HEIGHT = 220;
const PAD = 28;

function esc(value: string): string {
    return value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

function emptyChart(note: string): Chart {
    const svg =
        `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="chart">` +
        `<text x="${WIDTH / 2}" y="${HEIGHT / 2}" text-anchor="middle" ` +
        `class="chart-empty">${esc(note)}</text></svg>`;
    return { svg, marks: 0 };
}

/** Timeline of a history response: one mark per record. */
export function levelsChart(records: HistoryRecord[]): Chart {
    if (records.length === 0) {
        return emptyChart("no records in range");
    }
    const t0 = Math.min(...records.map((r) => r.t_ms));
    const t1 = Math.max(...records.map((r) => r.t_ms));
    const span = Math.max(1, t1 - t0);
    const vMax = Math.max(1, ...records.map((r) => r.value));
    const x = (t: number) => PAD + ((t - t0) / span) * (WIDTH - 2 * PAD);
    const y = (v: number) => HEIGHT - PAD - (v / vMax) * (HEIGHT - 2 * PAD);

    const parts: string[] = [];
    let marks = 0;
    const levels = records.filter((r) => r.kind === "level");
    if (levels.length > 1) {
        const points = levels.map((r) => `${x(r.t_ms).toFixed(1)},${y(r.value).toFixed(1)}`);
        parts.push(`<polyline class="level-line" fill="none" points="${points.join(" ")}"/>`);
    }
    for (const record of records) {
        const cx = x(record.t_ms).toFixed(1);
        if (record.kind === "level") {
            parts.push(
                `<circle class="mark mark-level" cx="${cx}" cy="${y(record.value).toFixed(1)}" r="3"/>`
            );
        } else if (record.kind === "squeeze") {
            parts.push(
                `<circle class="mark mark-squeeze" cx="${cx}" cy="${y(record.value).toFixed(1)}" r="2.5"/>`
            );
        } else {
            // prompts, sessions, silent toggles: ticks on the event lane
            parts.push(
                `<rect class="mark mark-event" x="${cx}" y="${HEIGHT - PAD + 4}" width="2" height="10"/>`
            );
        }
        marks += 1;
    }
    const svg =
        `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="chart">` +
        `<line class="axis" x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}"/>` +
        parts.join("") +
        `</svg>`;
    return { svg, marks };
}

/** Per-day summary bars: mean and max level for each aggregate. */
export function dailyChart(days: DailyAggregate[]): Chart {
    if (days.length === 0) {
        return emptyChart("no days in range");
    }
    const vMax = Math.max(1, ...days.map((d) => d.maxLevel));
    const lane = (WIDTH - 2 * PAD) / days.length;
    const barWidth = Math.min(24, lane / 3);
    const yTo = (v: number) => HEIGHT - PAD - (v / vMax) * (HEIGHT - 2 * PAD);

    const parts: string[] = [];
    let marks = 0;
    days.forEach((day, i) => {
        const cx = PAD + lane * i + lane / 2;
        const meanY = yTo(day.meanLevel);
        const maxY = yTo(day.maxLevel);
        parts.push(
            `<rect class="bar bar-mean" x="${(cx - barWidth).toFixed(1)}" y="${meanY.toFixed(1)}" ` +
            `width="${barWidth.toFixed(1)}" height="${(HEIGHT - PAD - meanY).toFixed(1)}"/>`
        );
        parts.push(
            `<rect class="bar bar-max" x="${cx.toFixed(1)}" y="${maxY.toFixed(1)}" ` +
            `width="${barWidth.toFixed(1)}" height="${(HEIGHT - PAD - maxY).toFixed(1)}"/>`
        );
        parts.push(
            `<text class="bar-label" x="${cx.toFixed(1)}" y="${HEIGHT - 8}" text-anchor="middle">` +
            `${esc(day.day.slice(5))}</text>`
        );
        marks += 2;
    });
    const svg =
        `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" class="chart">` +
        `<line class="axis" x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}"/>` +
        parts.join("") +
        `</svg>`;
    return { svg, marks };
}
