/** Payload types for the window-annotation HTTP API. */

export interface VocabResponse {
  context: string[];
  activity: string[];
  low_evidence: { context: string; activity: string };
}

export interface PlanNext {
  done: boolean;
  key?: string;
  video_id?: string;
  index?: number;
  start_time_s?: number;
  end_time_s?: number;
  position?: number;
  total: number;
}

export interface ProgressResponse {
  pass_id: number;
  labeled: number;
  planned: number;
  done: boolean;
}

/** Field-for-field the canonical label CSV schema, plus the revision guard. */
export interface AnnotationBody {
  key: string;
  context: string;
  activity: string;
  context_transition: boolean;
  activity_transition: boolean;
  pass_id: number;
  annotator_id: string;
  created_at: string;
  base_revision: number;
}

export interface FrameSlot {
  slot: number;
  timestamp_s: number;
  decode_ok: boolean;
  png_base64?: string;
}

export interface FramesResponse {
  key: string;
  start_time_s: number;
  end_time_s: number;
  frames: FrameSlot[];
}

export interface TimelineRecord {
  window_id: string;
  start_time: number;
  end_time: number;
  context: string;
  context_score: number;
  activity: string;
  activity_score: number;
  context_transition: boolean;
  activity_transition: boolean;
}

export interface TimelineResponse {
  header: { video_id: string; L: number; run_id: string | null; model_hashes: Record<string, string> };
  records: TimelineRecord[];
}

export type SaveResult =
  | { status: "created"; revision: number }
  | { status: "stale"; revision: number }
  | { status: "invalid"; errors: Array<{ field: string; code: string; message: string }> }
  | { status: "offline" };
