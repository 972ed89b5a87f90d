// The device's built-in seven-group routine. The wire only carries step
// indices, so the app keeps this table to show names, instructions, and
// phase durations. Devices running a custom plan file will still mirror
// correctly for mode/step/phase; only the display text would differ.

export interface PlanStep {
    muscleGroup: string;
    instruction: string;
    tenseMs: number;
    relaxMs: number;
}

export const DEFAULT_PLAN: PlanStep[] = [
    { muscleGroup: "hands", instruction: "Clench your fists", tenseMs: 5000, relaxMs: 10000 },
    { muscleGroup: "upper arms", instruction: "Tense your upper arms", tenseMs: 5000, relaxMs: 10000 },
    { muscleGroup: "face", instruction: "Scrunch your face", tenseMs: 5000, relaxMs: 10000 },
    { muscleGroup: "shoulders", instruction: "Raise your shoulders", tenseMs: 5000, relaxMs: 10000 },
    { muscleGroup: "torso", instruction: "Tighten chest and stomach", tenseMs: 5000, relaxMs: 10000 },
    { muscleGroup: "legs", instruction: "Tense your thighs", tenseMs: 5000, relaxMs: 10000 },
    { muscleGroup: "feet", instruction: "Curl your toes", tenseMs: 5000, relaxMs: 10000 },
];

export function planStep(index: number): PlanStep {
    return DEFAULT_PLAN[index % DEFAULT_PLAN.length];
}
