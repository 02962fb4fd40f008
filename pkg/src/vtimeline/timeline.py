"""End-to-end visual timeline generation.

For each window: sample frames, run the context pathway (encode, normalize,
pool, classify, LOW_VIS fallback below tau) and the activity pathway (motion
or appearance features, classify, UNKNOWN fallback below tau), then mark
transition flags against the previous record, with both flags true on the
first window. The two pathways are independent: thresholding one never touches
the other's fields.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from .annotation import AXIS_ACTIVITY, AXIS_CONTEXT, LOW_EVIDENCE_LABEL
from .corpus import DEFAULT_WINDOW_S, FrameSource, Window, make_windows
from .features.extract import (
    FeatureSpec,
    FusedSpec,
    spec_from_dict,
    window_appearance_row,
    window_appearance_vectors,
    window_flow_row,
)
from .features.embeddings import pool
from .features.encoders import resolve_encoder
from .features.fusion import FusionStats
from .models import ModelBundle, apply_threshold


@dataclass
class TimelineRecord:
    window_id: str
    start_time: float
    end_time: float
    context: str
    context_score: float
    activity: str
    activity_score: float
    context_transition: bool = False
    activity_transition: bool = False

    def to_dict(self) -> dict:
        return {
            "window_id": self.window_id,
            "start_time": round(self.start_time, 4),
            "end_time": round(self.end_time, 4),
            "context": self.context,
            "context_score": round(self.context_score, 4),
            "activity": self.activity,
            "activity_score": round(self.activity_score, 4),
            "context_transition": self.context_transition,
            "activity_transition": self.activity_transition,
        }


def _predict_one(bundle: ModelBundle, row: np.ndarray, tau: float, fallback: str) -> tuple[str, float]:
    pred = bundle.classifier.predict(row.reshape(1, -1))[0]
    return apply_threshold(pred, tau, fallback), pred.score


def _context_fields(
    window: Window,
    source: FrameSource,
    bundle: ModelBundle,
    encoders: Optional[Mapping[str, object]],
    tau: float,
) -> tuple[str, float]:
    spec = spec_from_dict(bundle.feature_spec)
    if not isinstance(spec, FeatureSpec) or spec.kind != "clip":
        raise ValueError(f"context model expects clip features, has {bundle.feature_spec.get('kind')!r}")
    encoder = resolve_encoder(spec.encoder_id, encoders)
    vectors = window_appearance_vectors(window, source, encoder, spec.k)
    if not vectors:
        return LOW_EVIDENCE_LABEL[AXIS_CONTEXT], 0.0
    row = pool(vectors, spec.pooling).vector
    return _predict_one(bundle, row, tau, LOW_EVIDENCE_LABEL[AXIS_CONTEXT])


def _activity_fields(
    window: Window,
    source: FrameSource,
    bundle: ModelBundle,
    encoders: Optional[Mapping[str, object]],
    tau: float,
) -> tuple[str, float]:
    spec = spec_from_dict(bundle.feature_spec)
    fallback = LOW_EVIDENCE_LABEL[AXIS_ACTIVITY]
    if isinstance(spec, FusedSpec):
        if bundle.fusion_stats is None:
            raise ValueError("fused activity model is missing its fusion stats")
        encoder = resolve_encoder(spec.appearance.encoder_id, encoders)
        app_row = window_appearance_row(window, source, encoder, spec.appearance)
        if app_row is None:
            return fallback, 0.0
        flow_row = window_flow_row(window, source, spec.flow)
        stats = FusionStats.from_dict(bundle.fusion_stats)
        row = stats.transform(app_row.reshape(1, -1), flow_row.reshape(1, -1))[0]
    elif spec.kind == "flow":
        row = window_flow_row(window, source, spec)
    else:
        encoder = resolve_encoder(spec.encoder_id, encoders)
        app_row = window_appearance_row(window, source, encoder, spec)
        if app_row is None:
            return fallback, 0.0
        row = app_row
    return _predict_one(bundle, row, tau, fallback)


def generate_timeline(
    source: FrameSource,
    context_model: ModelBundle,
    activity_model: ModelBundle,
    tau_ctx: float = 0.0,
    tau_act: float = 0.0,
    window_length_s: float = DEFAULT_WINDOW_S,
    encoders: Optional[Mapping[str, object]] = None,
) -> list[TimelineRecord]:
    """Produce one record per complete window of the video."""
    record = source.record
    if record.readiness != "READY":
        raise ValueError(f"video {record.video_id} is not READY")
    windows = make_windows(record, window_length_s)
    records = []
    for window in windows:
        context, ctx_score = _context_fields(window, source, context_model, encoders, tau_ctx)
        activity, act_score = _activity_fields(window, source, activity_model, encoders, tau_act)
        records.append(
            TimelineRecord(
                window_id=window.key,
                start_time=window.start_time_s,
                end_time=window.end_time_s,
                context=context,
                context_score=ctx_score,
                activity=activity,
                activity_score=act_score,
            )
        )
    for i, rec in enumerate(records):
        if i == 0:
            rec.context_transition = True
            rec.activity_transition = True
        else:
            rec.context_transition = rec.context != records[i - 1].context
            rec.activity_transition = rec.activity != records[i - 1].activity
    return records


def model_file_hash(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:12]


def write_timeline_jsonl(
    path: str | Path,
    records: list[TimelineRecord],
    video_id: str,
    window_length_s: float,
    run_id: Optional[str] = None,
    model_hashes: Optional[dict] = None,
) -> None:
    """One record per line after a header line; floats held to 4 decimals."""
    header = {
        "video_id": video_id,
        "L": round(window_length_s, 4),
        "run_id": run_id,
        "model_hashes": model_hashes or {},
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")


def read_timeline_jsonl(path: str | Path) -> tuple[dict, list[TimelineRecord]]:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"empty timeline file {path}")
    header = json.loads(lines[0])
    if "window_id" in header:
        raise ValueError("timeline file is missing its header line")
    records = []
    for line in lines[1:]:
        obj = json.loads(line)
        records.append(
            TimelineRecord(
                window_id=obj["window_id"],
                start_time=float(obj["start_time"]),
                end_time=float(obj["end_time"]),
                context=obj["context"],
                context_score=float(obj["context_score"]),
                activity=obj["activity"],
                activity_score=float(obj["activity_score"]),
                context_transition=bool(obj["context_transition"]),
                activity_transition=bool(obj["activity_transition"]),
            )
        )
    return header, records
