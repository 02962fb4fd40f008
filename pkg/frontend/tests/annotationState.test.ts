import { describe, expect, it } from "vitest";

import {
  blockedReason,
  buildAnnotationBody,
  canSave,
  initialState,
  loadWindow,
  selectActivity,
  selectContext,
  toggleActivityTransition,
  toggleContextTransition,
} from "../src/annotationState.js";
import type { PlanNext, VocabResponse } from "../src/types.js";

const VOCAB: VocabResponse = {
  context: ["PATROL_VEHICLE", "OUTDOOR", "INDOOR", "LOW_VIS"],
  activity: ["ROUTINE", "FOOT_PURSUIT", "HIGH_ACTIVITY", "UNKNOWN"],
  low_evidence: { context: "LOW_VIS", activity: "UNKNOWN" },
};

const NEXT: PlanNext = {
  done: false,
  key: "vid01:00003",
  video_id: "vid01",
  index: 3,
  start_time_s: 30,
  end_time_s: 40,
  position: 2,
  total: 12,
};

function loaded() {
  return loadWindow(initialState(), NEXT);
}

describe("save gating", () => {
  it("blocks save until both axes are selected", () => {
    let state = loaded();
    expect(canSave(state)).toBe(false);
    expect(blockedReason(state)).toMatch(/context and an activity/);

    state = selectContext(state, "OUTDOOR", VOCAB);
    expect(canSave(state)).toBe(false);
    expect(blockedReason(state)).toMatch(/activity/);

    state = selectActivity(state, "ROUTINE", VOCAB);
    expect(canSave(state)).toBe(true);
    expect(blockedReason(state)).toBeNull();
  });

  it("blocks save with only an activity selected", () => {
    const state = selectActivity(loaded(), "ROUTINE", VOCAB);
    expect(canSave(state)).toBe(false);
    expect(blockedReason(state)).toMatch(/context/);
  });

  it("never enables save without a loaded window", () => {
    let state = selectContext(initialState(), "OUTDOOR", VOCAB);
    state = selectActivity(state, "ROUTINE", VOCAB);
    expect(canSave(state)).toBe(false);
  });

  it("nothing is preselected, including low-evidence labels", () => {
    const state = loaded();
    expect(state.selectedContext).toBeNull();
    expect(state.selectedActivity).toBeNull();
  });

  it("low-evidence labels are selectable as first-class values", () => {
    let state = selectContext(loaded(), "LOW_VIS", VOCAB);
    state = selectActivity(state, "UNKNOWN", VOCAB);
    expect(canSave(state)).toBe(true);
    expect(state.selectedContext).toBe("LOW_VIS");
    expect(state.selectedActivity).toBe("UNKNOWN");
  });
});

describe("vocabulary discipline", () => {
  it("rejects labels outside the server vocabulary", () => {
    const state = selectContext(loaded(), "STREET", VOCAB);
    expect(state.selectedContext).toBeNull();
    expect(state.message).toMatch(/unknown context/);
  });
});

describe("annotation body", () => {
  it("maps screen state onto the CSV schema field-for-field", () => {
    let state = loaded();
    state = selectContext(state, "INDOOR", VOCAB);
    state = selectActivity(state, "HIGH_ACTIVITY", VOCAB);
    state = toggleContextTransition(state);
    const body = buildAnnotationBody(state, 2, "annotator-7", 0, () => "2026-08-10T12:00:00Z");
    expect(body).toEqual({
      key: "vid01:00003",
      context: "INDOOR",
      activity: "HIGH_ACTIVITY",
      context_transition: true,
      activity_transition: false,
      pass_id: 2,
      annotator_id: "annotator-7",
      created_at: "2026-08-10T12:00:00Z",
      base_revision: 0,
    });
    // Exactly the canonical CSV columns plus the concurrency guard.
    expect(Object.keys(body).sort()).toEqual(
      [
        "key",
        "context",
        "activity",
        "context_transition",
        "activity_transition",
        "pass_id",
        "annotator_id",
        "created_at",
        "base_revision",
      ].sort(),
    );
  });

  it("throws when the gate is closed", () => {
    expect(() => buildAnnotationBody(loaded(), 1, "a")).toThrow(/select/);
  });

  it("transition toggles flip independently", () => {
    let state = loaded();
    state = toggleActivityTransition(state);
    expect(state.activityTransition).toBe(true);
    expect(state.contextTransition).toBe(false);
    state = toggleActivityTransition(state);
    expect(state.activityTransition).toBe(false);
  });
});

describe("queue end", () => {
  it("marks the screen done when the plan is exhausted", () => {
    const state = loadWindow(initialState(), { done: true, total: 12 });
    expect(state.queueDone).toBe(true);
    expect(state.window).toBeNull();
    expect(canSave(state)).toBe(false);
  });
});
