/** Thin fetch client for the annotation service. No retries, no caching:
 * offline handling is the controller's job. */

import type {
  AnnotationBody,
  FramesResponse,
  PlanNext,
  ProgressResponse,
  SaveResult,
  TimelineResponse,
  VocabResponse,
} from "./types.js";

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly authToken?: string,
  ) {}

  private headers(json = false): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h["Content-Type"] = "application/json";
    if (this.authToken) h["x-auth-token"] = this.authToken;
    return h;
  }

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, { headers: this.headers() });
    if (!resp.ok) throw new Error(`GET ${path} failed: ${resp.status}`);
    return (await resp.json()) as T;
  }

  getVocab(): Promise<VocabResponse> {
    return this.getJson("/vocab");
  }

  getPlanNext(passId: number): Promise<PlanNext> {
    return this.getJson(`/plan/${passId}`);
  }

  getProgress(passId: number): Promise<ProgressResponse> {
    return this.getJson(`/progress/${passId}`);
  }

  getFrames(key: string, k?: number): Promise<FramesResponse> {
    const query = k ? `?k=${k}` : "";
    return this.getJson(`/windows/${encodeURIComponent(key)}/frames${query}`);
  }

  mediaUrl(key: string): string {
    return `${this.baseUrl}/windows/${encodeURIComponent(key)}/media`;
  }

  async getTimeline(videoId: string): Promise<TimelineResponse | null> {
    const resp = await fetch(`${this.baseUrl}/timelines/${encodeURIComponent(videoId)}`, {
      headers: this.headers(),
    });
    if (resp.status === 404) return null;
    if (!resp.ok) throw new Error(`GET /timelines/${videoId} failed: ${resp.status}`);
    return (await resp.json()) as TimelineResponse;
  }

  async postAnnotation(body: AnnotationBody): Promise<SaveResult> {
    let resp: Response;
    try {
      resp = await fetch(`${this.baseUrl}/annotations`, {
        method: "POST",
        headers: this.headers(true),
        body: JSON.stringify(body),
      });
    } catch {
      return { status: "offline" };
    }
    if (resp.status === 201) {
      const payload = (await resp.json()) as { revision: number };
      return { status: "created", revision: payload.revision };
    }
    if (resp.status === 409) {
      const payload = (await resp.json()) as { revision: number };
      return { status: "stale", revision: payload.revision };
    }
    if (resp.status === 400) {
      const payload = (await resp.json()) as {
        errors: Array<{ field: string; code: string; message: string }>;
      };
      return { status: "invalid", errors: payload.errors };
    }
    throw new Error(`POST /annotations failed: ${resp.status}`);
  }
}
