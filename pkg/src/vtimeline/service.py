"""JSON-over-HTTP service backing the annotation UI and programmatic review.

The service only ever writes the label store (persisted as canonical JSONL
next to the configured path) and report directories; corpus media and feature
files stay read-only. Annotation writes are optimistic-concurrency guarded by
per-(key, pass) revision numbers behind a single writer lock. Long feature or
grid jobs belong in the CLI, never in request handlers.
"""

from __future__ import annotations

import base64
import json
import re
import threading
from pathlib import Path

import cv2
import numpy as np
from fastapi import Body, FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse

from . import imgio
from .annotation import (
    ACTIVITY_LABELS,
    CONTEXT_LABELS,
    LOW_EVIDENCE_LABEL,
    LabelStore,
    WindowAnnotation,
    agreement_matrix,
    cohens_kappa,
    exact_agreement,
    export_jsonl,
    import_jsonl,
    validate_annotation,
    vocabulary,
)
from .config import ProjectConfig
from .corpus import (
    READY,
    ManifestFrameSource,
    build_inventory,
    build_sampling_plan,
    discover_corpus,
    make_windows,
    open_source,
    parse_window_key,
    probe_video,
    sample_frames,
    window_key,
)
from .timeline import read_timeline_jsonl

_RANGE_RE = re.compile(r"bytes=(\d*)-(\d*)")


class ServiceState:
    """Corpus snapshot plus the single mutable label store."""

    def __init__(self, config: ProjectConfig):
        self.config = config
        self.lock = threading.Lock()
        self.records = []
        self.sources = {}
        self.windows = {}
        for uri in discover_corpus(config.corpus_root):
            record = probe_video(uri)
            if record.readiness != READY:
                continue
            self.records.append(record)
            self.sources[record.video_id] = open_source(uri)
            self.windows[record.video_id] = make_windows(record, config.window_length_s)
        self.inventory = build_inventory(self.records, config.window_length_s)
        self.plans = {
            record.video_id: build_sampling_plan(
                self.windows[record.video_id], config.k_cov, config.k_rand, config.plan_seed
            )
            for record in self.records
        }
        # One fixed queue; every pass re-serves the same keys in the same order.
        self.queue = [
            window_key(video_id, index)
            for video_id in sorted(self.plans)
            for index in self.plans[video_id].selected_indices
        ]
        self.store = (
            import_jsonl(config.storage.labels_path) if config.storage.labels_path.exists() else LabelStore()
        )

    def persist(self) -> None:
        export_jsonl(self.store, self.config.storage.labels_path)

    def window_by_key(self, key: str):
        try:
            video_id, index = parse_window_key(key)
        except ValueError:
            return None
        wins = self.windows.get(video_id)
        if wins is None or index >= len(wins):
            return None
        return wins[index]


def create_app(config: ProjectConfig) -> FastAPI:
    state = ServiceState(config)
    app = FastAPI(title="vtimeline", version="0.1.0")
    app.state.vtimeline = state

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        # Deployment-grade auth is out of scope; a single shared token gates
        # everything but the health probe when configured.
        if config.auth_token and request.url.path != "/health":
            if request.headers.get("x-auth-token") != config.auth_token:
                return JSONResponse({"error": "missing or bad token"}, status_code=401)
        return await call_next(request)

    @app.get("/health")
    def health():
        return {"status": "ok", "videos": len(state.records)}

    @app.get("/vocab")
    def vocab():
        return {
            "context": list(CONTEXT_LABELS),
            "activity": list(ACTIVITY_LABELS),
            "low_evidence": dict(LOW_EVIDENCE_LABEL),
        }

    @app.get("/videos")
    def videos():
        return [r.to_dict() for r in state.records]

    @app.get("/videos/{video_id}/windows")
    def video_windows(video_id: str):
        wins = state.windows.get(video_id)
        if wins is None:
            return JSONResponse({"error": f"unknown video {video_id}"}, status_code=404)
        return [w.to_dict() for w in wins]

    @app.get("/plan/{pass_id}")
    def next_planned(pass_id: int):
        labeled = {a.key for a in state.store.pass_rows(pass_id)}
        for position, key in enumerate(state.queue):
            if key in labeled:
                continue
            win = state.window_by_key(key)
            return {
                "done": False,
                "key": key,
                "video_id": win.video_id,
                "index": win.index,
                "start_time_s": win.start_time_s,
                "end_time_s": win.end_time_s,
                "position": position,
                "total": len(state.queue),
            }
        return {"done": True, "total": len(state.queue)}

    @app.get("/progress/{pass_id}")
    def progress(pass_id: int):
        labeled = {a.key for a in state.store.pass_rows(pass_id)}
        planned = set(state.queue)
        done = len(labeled & planned)
        return {"pass_id": pass_id, "labeled": done, "planned": len(planned), "done": done == len(planned)}

    @app.get("/windows/{key}/frames")
    def window_frames(key: str, k: int = Query(default=None)):
        win = state.window_by_key(key)
        if win is None:
            return JSONResponse({"error": f"unknown window {key}"}, status_code=404)
        source = state.sources[win.video_id]
        k = k or config.frames_per_window
        refs = sample_frames(win, k, source)
        frames = []
        for ref in refs:
            entry = {"slot": ref.frame_slot, "timestamp_s": ref.timestamp_s, "decode_ok": ref.decode_ok}
            if ref.decode_ok and ref.frame_index is not None:
                img = source.read_frame(ref.frame_index)
                if img is not None:
                    ok, buf = cv2.imencode(".png", imgio.to_uint8(imgio.to_grayscale(img)))
                    if ok:
                        entry["png_base64"] = base64.b64encode(buf.tobytes()).decode("ascii")
            frames.append(entry)
        return {"key": key, "start_time_s": win.start_time_s, "end_time_s": win.end_time_s, "frames": frames}

    @app.get("/windows/{key}/media")
    def window_media(key: str, request: Request):
        win = state.window_by_key(key)
        if win is None:
            return JSONResponse({"error": f"unknown window {key}"}, status_code=404)
        source = state.sources[win.video_id]
        if isinstance(source, ManifestFrameSource):
            # Frame strip: sampled frames concatenated horizontally.
            refs = sample_frames(win, min(config.frames_per_window, 5), source)
            imgs = [
                imgio.to_uint8(imgio.to_grayscale(source.read_frame(r.frame_index)))
                for r in refs
                if r.decode_ok and r.frame_index is not None
            ]
            if not imgs:
                return JSONResponse({"error": "no decodable frames"}, status_code=404)
            strip = np.hstack(imgs)
            ok, buf = cv2.imencode(".png", strip)
            return Response(content=buf.tobytes(), media_type="image/png")
        # Container file: serve source bytes, honoring a single byte range.
        path = Path(source.record.source_uri)
        data = path.read_bytes()
        range_header = request.headers.get("range")
        if range_header:
            m = _RANGE_RE.match(range_header)
            if m:
                start = int(m.group(1) or 0)
                end = int(m.group(2) or len(data) - 1)
                end = min(end, len(data) - 1)
                chunk = data[start : end + 1]
                return Response(
                    content=chunk,
                    status_code=206,
                    media_type="video/mp4",
                    headers={
                        "Content-Range": f"bytes {start}-{end}/{len(data)}",
                        "Accept-Ranges": "bytes",
                    },
                )
        return Response(content=data, media_type="video/mp4", headers={"Accept-Ranges": "bytes"})

    @app.post("/annotations")
    def post_annotation(body: dict = Body(...)):
        known = {
            "key",
            "context",
            "activity",
            "context_transition",
            "activity_transition",
            "pass_id",
            "annotator_id",
            "created_at",
            "base_revision",
        }
        unknown = sorted(set(body) - known)
        if unknown:
            return JSONResponse(
                {"errors": [{"field": k, "code": "unknown", "message": f"unknown field {k}"} for k in unknown]},
                status_code=400,
            )
        try:
            annotation = WindowAnnotation(
                key=body.get("key", ""),
                context=body.get("context", ""),
                activity=body.get("activity", ""),
                context_transition=body.get("context_transition", False),
                activity_transition=body.get("activity_transition", False),
                pass_id=body.get("pass_id", 1),
                annotator_id=body.get("annotator_id", ""),
                created_at=body.get("created_at", ""),
            )
        except TypeError as exc:
            return JSONResponse({"errors": [{"field": "", "code": "type", "message": str(exc)}]}, status_code=400)
        errors = validate_annotation(annotation, state.inventory)
        if errors:
            return JSONResponse({"errors": errors}, status_code=400)
        base_revision = int(body.get("base_revision", 0))
        with state.lock:
            current = state.store.revisions.get((annotation.key, annotation.pass_id), 0)
            if base_revision != current:
                return JSONResponse(
                    {"error": "stale revision", "revision": current}, status_code=409
                )
            revision = state.store.add(annotation, state.inventory)
            state.persist()
        return JSONResponse({"revision": revision, "key": annotation.key}, status_code=201)

    @app.get("/agreement")
    def agreement(p1: int = Query(...), p2: int = Query(...), axis: str = Query(default="context")):
        if axis not in ("context", "activity"):
            return JSONResponse({"error": f"unknown axis {axis}"}, status_code=400)
        pass1 = state.store.pass_map(p1)
        pass2 = state.store.pass_map(p2)
        shared = set(pass1) & set(pass2)
        pass1 = {k: v for k, v in pass1.items() if k in shared}
        pass2 = {k: v for k, v in pass2.items() if k in shared}
        if not shared:
            return JSONResponse({"error": "no overlapping keys between passes"}, status_code=400)
        try:
            kappa = cohens_kappa(pass1, pass2, axis)
        except ValueError:
            kappa = None
        return {
            "axis": axis,
            "n_items": len(shared),
            "exact_agreement": exact_agreement(pass1, pass2, axis),
            "kappa": kappa,
            "labels": list(vocabulary(axis)),
            "matrix_normalized": agreement_matrix(pass1, pass2, axis, row_normalize=True).tolist(),
        }

    @app.get("/timelines/{video_id}")
    def timeline(video_id: str):
        path = config.storage.timelines_dir / f"{video_id}.timeline.jsonl"
        if not path.exists():
            return JSONResponse({"error": f"no timeline for {video_id}"}, status_code=404)
        header, records = read_timeline_jsonl(path)
        return {"header": header, "records": [r.to_dict() for r in records]}

    @app.get("/reports/{run_id}")
    def report(run_id: str):
        path = config.storage.reports_dir / run_id / "report.json"
        if not path.exists():
            return JSONResponse({"error": f"no report for {run_id}"}, status_code=404)
        return json.loads(path.read_text(encoding="utf-8"))

    return app
