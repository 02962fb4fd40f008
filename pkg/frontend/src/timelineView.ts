/** Band layout for the two-track timeline view.
 *
 * Each record becomes one band per track, width proportional to the window
 * duration, opacity proportional to the model confidence, tick marks where a
 * transition flag is set, and a distinct visual treatment for low-evidence
 * labels. Clicking a band seeks the player to the window's start time.
 */

import type { TimelineRecord, VocabResponse } from "./types.js";

export interface Band {
  windowId: string;
  startTime: number;
  endTime: number;
  label: string;
  /** Left edge and width as percentages of the full timeline span. */
  leftPct: number;
  widthPct: number;
  color: string;
  opacity: number;
  lowEvidence: boolean;
  transitionTick: boolean;
}

export interface TimelineLayout {
  spanStart: number;
  spanEnd: number;
  context: Band[];
  activity: Band[];
}

const PALETTE = ["#3b6ea5", "#4f9d69", "#b0623a", "#7b5aa6", "#a5763b", "#5aa6a0", "#a05a78", "#6e6e6e"];
const MIN_OPACITY = 0.25;

/** Color per label position in the server vocabulary (labels are never
 * invented client-side; unknown labels fall back to gray). */
export function labelColor(label: string, vocabAxis: string[]): string {
  const index = vocabAxis.indexOf(label);
  return index >= 0 ? PALETTE[index % PALETTE.length] : "#444444";
}

export function confidenceOpacity(score: number): number {
  const clamped = Math.max(0, Math.min(1, score));
  return MIN_OPACITY + (1 - MIN_OPACITY) * clamped;
}

function band(
  record: TimelineRecord,
  axis: "context" | "activity",
  span: { start: number; end: number },
  vocab: VocabResponse,
): Band {
  const label = axis === "context" ? record.context : record.activity;
  const score = axis === "context" ? record.context_score : record.activity_score;
  const tick = axis === "context" ? record.context_transition : record.activity_transition;
  const total = span.end - span.start;
  return {
    windowId: record.window_id,
    startTime: record.start_time,
    endTime: record.end_time,
    label,
    leftPct: (100 * (record.start_time - span.start)) / total,
    widthPct: (100 * (record.end_time - record.start_time)) / total,
    color: labelColor(label, axis === "context" ? vocab.context : vocab.activity),
    opacity: confidenceOpacity(score),
    lowEvidence: label === vocab.low_evidence[axis],
    transitionTick: tick,
  };
}

export function layoutTimeline(records: TimelineRecord[], vocab: VocabResponse): TimelineLayout {
  if (records.length === 0) {
    return { spanStart: 0, spanEnd: 0, context: [], activity: [] };
  }
  const span = { start: records[0].start_time, end: records[records.length - 1].end_time };
  return {
    spanStart: span.start,
    spanEnd: span.end,
    context: records.map((r) => band(r, "context", span, vocab)),
    activity: records.map((r) => band(r, "activity", span, vocab)),
  };
}

/** Where a click on a band should seek the media player. */
export function seekTargetForBand(b: Band): number {
  return b.startTime;
}

export function emptyStateMessage(videoId: string): string {
  return `No timeline exists for ${videoId} yet. Generate one with: vtimeline timeline --video <uri> --ctx-model ... --act-model ...`;
}
