/** Keyboard shortcuts for the labeling loop.
 *
 * Digits 1-4 pick the context label at that position in the server-provided
 * vocabulary; Q/W/E/R pick the activity label the same way; T and Y toggle
 * the context/activity transition flags; Enter saves. The bindings derive
 * from the vocabulary arrays, never from hard-coded label names.
 */

import type { VocabResponse } from "./types.js";

export type KeyAction =
  | { kind: "select-context"; label: string }
  | { kind: "select-activity"; label: string }
  | { kind: "toggle-context-transition" }
  | { kind: "toggle-activity-transition" }
  | { kind: "save" }
  | { kind: "none" };

const ACTIVITY_KEYS = ["q", "w", "e", "r"];

export function actionForKey(key: string, vocab: VocabResponse): KeyAction {
  const lower = key.toLowerCase();
  if (/^[1-9]$/.test(lower)) {
    const index = Number(lower) - 1;
    if (index < vocab.context.length) return { kind: "select-context", label: vocab.context[index] };
    return { kind: "none" };
  }
  const activityIndex = ACTIVITY_KEYS.indexOf(lower);
  if (activityIndex >= 0 && activityIndex < vocab.activity.length) {
    return { kind: "select-activity", label: vocab.activity[activityIndex] };
  }
  if (lower === "t") return { kind: "toggle-context-transition" };
  if (lower === "y") return { kind: "toggle-activity-transition" };
  if (lower === "enter") return { kind: "save" };
  return { kind: "none" };
}

/** Legend entries for rendering shortcut hints next to the label buttons. */
export function shortcutLegend(vocab: VocabResponse): Array<{ key: string; label: string; axis: string }> {
  const legend: Array<{ key: string; label: string; axis: string }> = [];
  vocab.context.forEach((label, i) => legend.push({ key: String(i + 1), label, axis: "context" }));
  vocab.activity.forEach((label, i) => {
    if (i < ACTIVITY_KEYS.length) legend.push({ key: ACTIVITY_KEYS[i].toUpperCase(), label, axis: "activity" });
  });
  legend.push({ key: "T", label: "context transition", axis: "flag" });
  legend.push({ key: "Y", label: "activity transition", axis: "flag" });
  legend.push({ key: "Enter", label: "save", axis: "action" });
  return legend;
}
