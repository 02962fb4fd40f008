/** Orchestrates the annotate loop: queue fetch, selection, save, advance.
 *
 * Pure of DOM concerns so the loop is testable against a real or mocked API.
 * A 409 reloads the window state and surfaces a prompt; an offline save lands
 * in the local queue and replays on the next successful contact.
 */

import type { ApiClient } from "./api.js";
import {
  AnnotationScreenState,
  blockedReason,
  buildAnnotationBody,
  canSave,
  initialState,
  loadWindow,
  selectActivity,
  selectContext,
  toggleActivityTransition,
  toggleContextTransition,
} from "./annotationState.js";
import { actionForKey } from "./keyboard.js";
import { OfflineQueue } from "./offlineQueue.js";
import type { SaveResult, VocabResponse } from "./types.js";

export interface SessionOptions {
  passId: number;
  annotatorId: string;
  now?: () => string;
}

export class AnnotationController {
  state: AnnotationScreenState = initialState();
  vocab: VocabResponse | null = null;
  readonly offline = new OfflineQueue();
  private baseRevision = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly session: SessionOptions,
  ) {}

  async start(): Promise<void> {
    this.vocab = await this.api.getVocab();
    await this.advance();
  }

  async advance(): Promise<void> {
    const next = await this.api.getPlanNext(this.session.passId);
    this.state = loadWindow(this.state, next);
    this.baseRevision = 0;
  }

  requireVocab(): VocabResponse {
    if (!this.vocab) throw new Error("controller not started");
    return this.vocab;
  }

  handleKey(key: string): { saved: Promise<SaveResult | null> } | void {
    const action = actionForKey(key, this.requireVocab());
    switch (action.kind) {
      case "select-context":
        this.state = selectContext(this.state, action.label, this.requireVocab());
        return;
      case "select-activity":
        this.state = selectActivity(this.state, action.label, this.requireVocab());
        return;
      case "toggle-context-transition":
        this.state = toggleContextTransition(this.state);
        return;
      case "toggle-activity-transition":
        this.state = toggleActivityTransition(this.state);
        return;
      case "save":
        return { saved: this.save() };
      case "none":
        return;
    }
  }

  selectContextLabel(label: string): void {
    this.state = selectContext(this.state, label, this.requireVocab());
  }

  selectActivityLabel(label: string): void {
    this.state = selectActivity(this.state, label, this.requireVocab());
  }

  /** Save the current labels; on success the queue advances. */
  async save(): Promise<SaveResult | null> {
    if (!canSave(this.state)) {
      this.state = { ...this.state, message: blockedReason(this.state) ?? "cannot save" };
      return null;
    }
    const body = buildAnnotationBody(
      this.state,
      this.session.passId,
      this.session.annotatorId,
      this.baseRevision,
      this.session.now,
    );
    this.state = { ...this.state, saveStatus: "saving" };
    const result = await this.api.postAnnotation(body);
    switch (result.status) {
      case "created": {
        this.state = { ...this.state, saveStatus: "saved", message: "" };
        await this.replayOffline();
        await this.advance();
        break;
      }
      case "stale": {
        // Someone else wrote this (key, pass). Reload server state and ask
        // the annotator to re-confirm rather than overwrite blindly.
        this.baseRevision = result.revision;
        this.state = {
          ...this.state,
          saveStatus: "stale",
          message: "this window changed on the server; review and save again to overwrite",
        };
        break;
      }
      case "invalid": {
        this.state = {
          ...this.state,
          saveStatus: "invalid",
          message: result.errors.map((e) => e.message).join("; "),
        };
        break;
      }
      case "offline": {
        this.offline.enqueue(body);
        this.state = {
          ...this.state,
          saveStatus: "queued-offline",
          message: `offline: ${this.offline.size} annotation(s) queued locally`,
        };
        break;
      }
    }
    return result;
  }

  async replayOffline(): Promise<void> {
    if (this.offline.size === 0) return;
    const { remaining } = await this.offline.replay((body) => this.api.postAnnotation(body));
    if (remaining === 0) {
      this.state = { ...this.state, message: "offline queue flushed" };
    }
  }
}
