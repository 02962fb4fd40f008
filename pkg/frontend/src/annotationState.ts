/** Pure state for the annotation screen.
 *
 * The screen shows one window at a time: header info, looping media preview,
 * and the label panel. Save is enabled only when exactly one context and one
 * activity label are selected; low-evidence labels are ordinary selectable
 * values and nothing is ever pre-selected for the annotator.
 */

import type { AnnotationBody, PlanNext, VocabResponse } from "./types.js";

export interface WindowHeader {
  key: string;
  videoId: string;
  index: number;
  startTimeS: number;
  endTimeS: number;
  position: number;
  total: number;
}

export type SaveStatus = "idle" | "saving" | "saved" | "stale" | "invalid" | "queued-offline";

export interface AnnotationScreenState {
  window: WindowHeader | null;
  selectedContext: string | null;
  selectedActivity: string | null;
  contextTransition: boolean;
  activityTransition: boolean;
  saveStatus: SaveStatus;
  message: string;
  queueDone: boolean;
}

export function initialState(): AnnotationScreenState {
  return {
    window: null,
    selectedContext: null,
    selectedActivity: null,
    contextTransition: false,
    activityTransition: false,
    saveStatus: "idle",
    message: "",
    queueDone: false,
  };
}

export function loadWindow(_state: AnnotationScreenState, next: PlanNext): AnnotationScreenState {
  if (next.done || next.key === undefined) {
    return { ...initialState(), queueDone: true, message: "All planned windows are labeled." };
  }
  return {
    ...initialState(),
    window: {
      key: next.key,
      videoId: next.video_id ?? "",
      index: next.index ?? 0,
      startTimeS: next.start_time_s ?? 0,
      endTimeS: next.end_time_s ?? 0,
      position: next.position ?? 0,
      total: next.total,
    },
  };
}

export function selectContext(state: AnnotationScreenState, label: string, vocab: VocabResponse): AnnotationScreenState {
  if (!vocab.context.includes(label)) return { ...state, message: `unknown context label ${label}` };
  return { ...state, selectedContext: label, saveStatus: "idle", message: "" };
}

export function selectActivity(state: AnnotationScreenState, label: string, vocab: VocabResponse): AnnotationScreenState {
  if (!vocab.activity.includes(label)) return { ...state, message: `unknown activity label ${label}` };
  return { ...state, selectedActivity: label, saveStatus: "idle", message: "" };
}

export function toggleContextTransition(state: AnnotationScreenState): AnnotationScreenState {
  return { ...state, contextTransition: !state.contextTransition };
}

export function toggleActivityTransition(state: AnnotationScreenState): AnnotationScreenState {
  return { ...state, activityTransition: !state.activityTransition };
}

/** Save gate: exactly one context AND one activity selected on a live window. */
export function canSave(state: AnnotationScreenState): boolean {
  return state.window !== null && state.selectedContext !== null && state.selectedActivity !== null;
}

export function blockedReason(state: AnnotationScreenState): string | null {
  if (state.window === null) return "no window loaded";
  if (state.selectedContext === null && state.selectedActivity === null) return "select a context and an activity label";
  if (state.selectedContext === null) return "select a context label";
  if (state.selectedActivity === null) return "select an activity label";
  return null;
}

/** The POST body; fields mirror the canonical CSV export schema exactly. */
export function buildAnnotationBody(
  state: AnnotationScreenState,
  passId: number,
  annotatorId: string,
  baseRevision = 0,
  now: () => string = () => new Date().toISOString().replace(/\.\d{3}Z$/, "Z"),
): AnnotationBody {
  if (!canSave(state) || state.window === null) {
    throw new Error(blockedReason(state) ?? "cannot save");
  }
  return {
    key: state.window.key,
    context: state.selectedContext as string,
    activity: state.selectedActivity as string,
    context_transition: state.contextTransition,
    activity_transition: state.activityTransition,
    pass_id: passId,
    annotator_id: annotatorId,
    created_at: now(),
    base_revision: baseRevision,
  };
}
