import { describe, expect, test } from "vitest";

import { dailyChart, levelsChart } from "../src/charts.js";
import { aggregateDaily } from "../src/history.js";
import { loadStoreFixture } from "./helpers.js";

const STORES = ["store1.json", "store2.json", "store3.json"];

describe("history chart cardinality on seeded stores", () => {
    for (const name of STORES) {
        test(`${name}: one mark per returned record`, () => {
            const fixture = loadStoreFixture(name);
            const records = fixture.response.records;
            expect(fixture.response.count).toBe(fixture.expected_count);
            expect(records.length).toBe(fixture.expected_count);

            const chart = levelsChart(records);
            expect(chart.marks).toBe(fixture.expected_count);
            expect((chart.svg.match(/class="mark /g) ?? []).length).toBe(chart.marks);
        });

        test(`${name}: daily aggregation matches the device's`, () => {
            const fixture = loadStoreFixture(name);
            const aggregates = aggregateDaily(fixture.response.records);
            expect(aggregates.map((a) => a.day)).toEqual(
                fixture.expected_daily.map((d) => d.day)
            );
            aggregates.forEach((agg, i) => {
                const expected = fixture.expected_daily[i];
                expect(agg.maxLevel).toBe(expected.max_level);
                expect(agg.squeezeCount).toBe(expected.squeeze_count);
                expect(agg.sessionsCompleted).toBe(expected.sessions_completed);
                expect(Math.abs(agg.meanLevel - expected.mean_level)).toBeLessThan(1e-9);
            });

            const chart = dailyChart(aggregates);
            expect(chart.marks).toBe(2 * aggregates.length); // mean + max bars
        });
    }
});

describe("chart edge cases", () => {
    test("two-day range yields two bar groups", () => {
        const dayMs = 86_400_000;
        const aggregates = aggregateDaily([
            { t_ms: 100, kind: "level", value: 10 },
            { t_ms: dayMs + 100, kind: "level", value: 30 },
        ]);
        expect(aggregates.length).toBe(2);
        expect(dailyChart(aggregates).marks).toBe(4);
    });

    test("empty range renders the empty-state note, zero marks", () => {
        const chart = levelsChart([]);
        expect(chart.marks).toBe(0);
        expect(chart.svg).toContain("no records in range");
        const daily = dailyChart([]);
        expect(daily.marks).toBe(0);
        expect(daily.svg).toContain("no days in range");
    });

    test("aggregation buckets by UTC day boundary", () => {
        const dayMs = 86_400_000;
        const aggregates = aggregateDaily([
            { t_ms: dayMs - 1, kind: "level", value: 1 },
            { t_ms: dayMs, kind: "level", value: 2 },
        ]);
        expect(aggregates.map((a) => a.day)).toEqual(["1970-01-01", "1970-01-02"]);
    });
});
