/** DOM wiring for the annotation screen and the timeline review view.
 *
 * The page is served statically; point it at a running service with
 * ?api=http://host:port (defaults to the same origin). Media playback loops
 * the sampled frames of exactly the current window; the annotator cannot
 * scrub outside it.
 */

import { ApiClient } from "./api.js";
import { canSave, blockedReason } from "./annotationState.js";
import { AnnotationController } from "./controller.js";
import { shortcutLegend } from "./keyboard.js";
import { emptyStateMessage, layoutTimeline, seekTargetForBand, type Band } from "./timelineView.js";
import type { FramesResponse, VocabResponse } from "./types.js";

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "", params.get("token") ?? undefined);
const controller = new AnnotationController(api, {
  passId: Number(params.get("pass") ?? "1"),
  annotatorId: params.get("annotator") ?? "anonymous",
});

const el = (id: string) => document.getElementById(id) as HTMLElement;

let frameTimer: number | undefined;

function startFrameLoop(frames: FramesResponse): void {
  const img = el("preview") as HTMLImageElement;
  const usable = frames.frames.filter((f) => f.decode_ok && f.png_base64);
  if (frameTimer !== undefined) window.clearInterval(frameTimer);
  if (usable.length === 0) {
    img.removeAttribute("src");
    el("preview-note").textContent = "no decodable frames in this window";
    return;
  }
  let cursor = 0;
  const show = () => {
    const frame = usable[cursor % usable.length];
    img.src = `data:image/png;base64,${frame.png_base64}`;
    el("preview-note").textContent = `t = ${frame.timestamp_s.toFixed(1)} s (loops inside the window)`;
    cursor += 1;
  };
  show();
  frameTimer = window.setInterval(show, 400);
}

function renderLabelButtons(vocab: VocabResponse): void {
  const contextBox = el("context-buttons");
  const activityBox = el("activity-buttons");
  contextBox.innerHTML = "";
  activityBox.innerHTML = "";
  vocab.context.forEach((label, i) => {
    const button = document.createElement("button");
    button.textContent = `${i + 1} ${label}`;
    button.dataset.label = label;
    button.className = "label-btn context-btn" + (label === vocab.low_evidence.context ? " low-evidence" : "");
    button.onclick = () => {
      controller.selectContextLabel(label);
      render();
    };
    contextBox.appendChild(button);
  });
  const activityKeys = ["Q", "W", "E", "R"];
  vocab.activity.forEach((label, i) => {
    const button = document.createElement("button");
    button.textContent = `${activityKeys[i] ?? ""} ${label}`;
    button.dataset.label = label;
    button.className = "label-btn activity-btn" + (label === vocab.low_evidence.activity ? " low-evidence" : "");
    button.onclick = () => {
      controller.selectActivityLabel(label);
      render();
    };
    activityBox.appendChild(button);
  });
  el("legend").textContent = shortcutLegend(vocab)
    .map((entry) => `${entry.key}=${entry.label}`)
    .join("  ");
}

function render(): void {
  const state = controller.state;
  const header = el("window-header");
  if (state.queueDone) {
    header.textContent = "Queue complete.";
  } else if (state.window) {
    const w = state.window;
    header.textContent =
      `incident ${w.videoId} · window ${w.index} · ` +
      `[${w.startTimeS.toFixed(2)} s, ${w.endTimeS.toFixed(2)} s) · ` +
      `${w.position + 1} of ${w.total}`;
  } else {
    header.textContent = "loading…";
  }
  document.querySelectorAll<HTMLButtonElement>(".context-btn").forEach((b) => {
    b.classList.toggle("selected", b.dataset.label === state.selectedContext);
  });
  document.querySelectorAll<HTMLButtonElement>(".activity-btn").forEach((b) => {
    b.classList.toggle("selected", b.dataset.label === state.selectedActivity);
  });
  (el("ctx-transition") as HTMLInputElement).checked = state.contextTransition;
  (el("act-transition") as HTMLInputElement).checked = state.activityTransition;
  const saveButton = el("save") as HTMLButtonElement;
  saveButton.disabled = !canSave(state);
  saveButton.title = blockedReason(state) ?? "save (Enter)";
  el("status").textContent = state.message || state.saveStatus;
}

async function refreshWindowMedia(): Promise<void> {
  const key = controller.state.window?.key;
  if (!key) return;
  try {
    startFrameLoop(await api.getFrames(key));
  } catch {
    el("preview-note").textContent = "media unavailable";
  }
}

async function saveAndAdvance(): Promise<void> {
  const before = controller.state.window?.key;
  await controller.save();
  render();
  if (controller.state.window?.key !== before) await refreshWindowMedia();
  render();
}

function wireAnnotationScreen(): void {
  (el("save") as HTMLButtonElement).onclick = () => void saveAndAdvance();
  (el("ctx-transition") as HTMLInputElement).onchange = () => {
    controller.handleKey("t");
    render();
  };
  (el("act-transition") as HTMLInputElement).onchange = () => {
    controller.handleKey("y");
    render();
  };
  document.addEventListener("keydown", (event) => {
    if ((event.target as HTMLElement)?.tagName === "INPUT") return;
    if (event.key === "Enter") {
      void saveAndAdvance();
      return;
    }
    controller.handleKey(event.key);
    render();
  });
}

// -- timeline review ---------------------------------------------------------

function renderBands(track: HTMLElement, bands: Band[], onSeek: (t: number, key: string) => void): void {
  track.innerHTML = "";
  for (const band of bands) {
    const div = document.createElement("div");
    div.className = "band" + (band.lowEvidence ? " low-evidence" : "");
    div.style.left = `${band.leftPct}%`;
    div.style.width = `${band.widthPct}%`;
    div.style.background = band.color;
    div.style.opacity = String(band.opacity);
    div.title = `${band.label} [${band.startTime}-${band.endTime}s]`;
    if (band.transitionTick) {
      const tick = document.createElement("span");
      tick.className = "tick";
      div.appendChild(tick);
    }
    div.onclick = () => onSeek(seekTargetForBand(band), band.windowId);
    track.appendChild(div);
  }
}

async function loadTimeline(): Promise<void> {
  const videoId = (el("timeline-video") as HTMLInputElement).value.trim();
  if (!videoId) return;
  const payload = await api.getTimeline(videoId);
  const note = el("timeline-note");
  if (payload === null) {
    note.textContent = emptyStateMessage(videoId);
    el("context-track").innerHTML = "";
    el("activity-track").innerHTML = "";
    return;
  }
  const vocab = controller.requireVocab();
  const layout = layoutTimeline(payload.records, vocab);
  note.textContent = `${payload.records.length} windows spanning [${layout.spanStart} s, ${layout.spanEnd} s)`;
  const seek = (t: number, key: string) => {
    note.textContent = `seeked to ${t.toFixed(1)} s (window ${key})`;
    void api.getFrames(key).then(startFrameLoop);
  };
  renderBands(el("context-track"), layout.context, seek);
  renderBands(el("activity-track"), layout.activity, seek);
}

async function start(): Promise<void> {
  await controller.start();
  renderLabelButtons(controller.requireVocab());
  wireAnnotationScreen();
  (el("timeline-load") as HTMLButtonElement).onclick = () => void loadTimeline();
  render();
  await refreshWindowMedia();
  render();
}

void start();
