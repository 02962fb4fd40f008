import { describe, expect, it } from "vitest";

import { actionForKey, shortcutLegend } from "../src/keyboard.js";
import type { VocabResponse } from "../src/types.js";

const VOCAB: VocabResponse = {
  context: ["PATROL_VEHICLE", "OUTDOOR", "INDOOR", "LOW_VIS"],
  activity: ["ROUTINE", "FOOT_PURSUIT", "HIGH_ACTIVITY", "UNKNOWN"],
  low_evidence: { context: "LOW_VIS", activity: "UNKNOWN" },
};

describe("keyboard shortcuts", () => {
  it("digits 1-4 pick context labels by vocabulary position", () => {
    expect(actionForKey("1", VOCAB)).toEqual({ kind: "select-context", label: "PATROL_VEHICLE" });
    expect(actionForKey("4", VOCAB)).toEqual({ kind: "select-context", label: "LOW_VIS" });
  });

  it("QWER pick activity labels by vocabulary position", () => {
    expect(actionForKey("q", VOCAB)).toEqual({ kind: "select-activity", label: "ROUTINE" });
    expect(actionForKey("R", VOCAB)).toEqual({ kind: "select-activity", label: "UNKNOWN" });
  });

  it("T/Y toggle transitions; Enter saves", () => {
    expect(actionForKey("t", VOCAB).kind).toBe("toggle-context-transition");
    expect(actionForKey("y", VOCAB).kind).toBe("toggle-activity-transition");
    expect(actionForKey("Enter", VOCAB).kind).toBe("save");
  });

  it("bindings follow the server vocabulary, not hard-coded names", () => {
    const reordered: VocabResponse = {
      context: ["INDOOR", "OUTDOOR"],
      activity: ["UNKNOWN", "ROUTINE"],
      low_evidence: { context: "LOW_VIS", activity: "UNKNOWN" },
    };
    expect(actionForKey("1", reordered)).toEqual({ kind: "select-context", label: "INDOOR" });
    expect(actionForKey("w", reordered)).toEqual({ kind: "select-activity", label: "ROUTINE" });
    // Positions past the vocabulary are inert.
    expect(actionForKey("3", reordered).kind).toBe("none");
    expect(actionForKey("e", reordered).kind).toBe("none");
  });

  it("unmapped keys do nothing", () => {
    expect(actionForKey("z", VOCAB).kind).toBe("none");
    expect(actionForKey("Escape", VOCAB).kind).toBe("none");
  });

  it("legend derives from the vocabulary", () => {
    const legend = shortcutLegend(VOCAB);
    expect(legend).toContainEqual({ key: "2", label: "OUTDOOR", axis: "context" });
    expect(legend).toContainEqual({ key: "W", label: "FOOT_PURSUIT", axis: "activity" });
    expect(legend.at(-1)).toEqual({ key: "Enter", label: "save", axis: "action" });
  });
});
