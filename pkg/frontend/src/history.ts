// Daily aggregation of history records, matching the device-side
// definition: UTC day buckets, level stats, squeeze/session counts.

import { HistoryRecord } from "./messages.js";

export interface DailyAggregate {
    day: string; // YYYY-MM-DD (UTC)
    meanLevel: number;
    maxLevel: number;
    squeezeCount: number;
    sessionsCompleted: number;
}

export function dayOf(tMs: number): string {
    return new Date(tMs).toISOString().slice(0, 10);
}

export function aggregateDaily(records: HistoryRecord[]): DailyAggregate[] {
    const buckets = new Map<string, HistoryRecord[]>();
    for (const record of records) {
        const day = dayOf(record.t_ms);
        const bucket = buckets.get(day);
        if (bucket) {
            bucket.push(record);
        } else {
            buckets.set(day, [record]);
        }
    }
    const days = [...buckets.keys()].sort();
    return days.map((day) => {
        const bucket = buckets.get(day)!;
        const levels = bucket.filter((r) => r.kind === "level").map((r) => r.value);
        return {
            day,
            meanLevel: levels.length
                ? levels.reduce((a, b) => a + b, 0) / levels.length
                : 0,
            maxLevel: levels.length ? Math.max(...levels) : 0,
            squeezeCount: bucket.filter((r) => r.kind === "squeeze").length,
            sessionsCompleted: bucket.filter((r) => r.kind === "session_completed")
                .length,
        };
    });
}
