from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

from vtimeline import imgio

hypothesis_settings.register_profile(
    "vtimeline", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
hypothesis_settings.load_profile("vtimeline")
from vtimeline.annotation import LabelStore, WindowAnnotation
from vtimeline.corpus import window_key


def write_manifest_video(
    root: Path,
    video_id: str = "v1",
    duration_s: float = 25.0,
    fps: float = 2.0,
    width: int = 160,
    height: int = 90,
    brightness: float = 120.0,
    frame_fn=None,
) -> Path:
    """Minimal manifest-backed fixture video with flat-ish frames."""
    video_dir = root / video_id
    frames_dir = video_dir / "frames"
    frames_dir.mkdir(parents=True)
    n_frames = int(duration_s * fps)
    rng = np.random.default_rng(0)
    base = np.clip(rng.normal(brightness, 12.0, size=(height, width)), 0, 255)
    for i in range(n_frames):
        frame = frame_fn(base, i) if frame_fn else base
        imgio.write_netpbm(frames_dir / f"{i:06d}.pgm", imgio.to_uint8(frame))
    manifest = {
        "video_id": video_id,
        "fps": fps,
        "duration_s": duration_s,
        "width": width,
        "height": height,
        "frame_pattern": "frames/%06d.pgm",
        "frame_count": n_frames,
    }
    (video_dir / "manifest.json").write_text(json.dumps(manifest), encoding="utf-8")
    return video_dir


@pytest.fixture
def manifest_video(tmp_path):
    return write_manifest_video(tmp_path)


@pytest.fixture(scope="session")
def mini_corpus(tmp_path_factory):
    """Six synthetic videos (3 context x 2 motion regimes), fully labeled."""
    from vtimeline.corpus import ManifestFrameSource, build_inventory, make_windows
    from vtimeline.synthetic import default_specs, generate_corpus

    root = tmp_path_factory.mktemp("mini_corpus")
    specs = default_specs(n_videos=6, duration_s=40.0)
    records, store = generate_corpus(root, specs)
    sources = {r.video_id: ManifestFrameSource(root / r.video_id) for r in records}
    windows = [w for r in records for w in make_windows(r, 10.0)]
    return {
        "root": root,
        "records": records,
        "store": store,
        "sources": sources,
        "windows": windows,
        "inventory": build_inventory(records, 10.0),
        "specs": specs,
    }


@pytest.fixture(scope="session")
def mini_models(mini_corpus, tmp_path_factory):
    """Context (clip) and activity (flow F1) models trained on the mini corpus."""
    from vtimeline.annotation import ACTIVITY_LABELS, CONTEXT_LABELS
    from vtimeline.features.extract import FeatureSpec, extract_features
    from vtimeline.models import TrainConfig, load_model, save_model, train_softmax

    out = tmp_path_factory.mktemp("mini_models")
    store = mini_corpus["store"]
    labels = {a.key: a for a in store.pass_rows(1)}

    ctx_spec = FeatureSpec(kind="clip", k=5, pooling="mean", encoder_id="test-hash-32")
    ctx_table = extract_features(mini_corpus["sources"], mini_corpus["windows"], ctx_spec)
    y_ctx = [labels[k].context for k in ctx_table.keys]
    ctx_clf = train_softmax(ctx_table.matrix, y_ctx, TrainConfig(max_iters=200), class_order=list(CONTEXT_LABELS))
    ctx_path = out / "ctx.json"
    save_model(ctx_path, ctx_clf, ctx_spec.to_dict(), ctx_table.layout, ctx_spec.encoder_id)

    act_spec = FeatureSpec(kind="flow", k=5, flow_preset="F1")
    act_table = extract_features(mini_corpus["sources"], mini_corpus["windows"], act_spec)
    y_act = [labels[k].activity for k in act_table.keys]
    act_clf = train_softmax(act_table.matrix, y_act, TrainConfig(max_iters=200), class_order=list(ACTIVITY_LABELS))
    act_path = out / "act.json"
    save_model(act_path, act_clf, act_spec.to_dict(), act_table.layout, None)

    return {
        "ctx_path": ctx_path,
        "act_path": act_path,
        "ctx_bundle": load_model(ctx_path),
        "act_bundle": load_model(act_path),
    }


def annotation_for(
    video_id: str,
    index: int,
    context: str = "OUTDOOR",
    activity: str = "ROUTINE",
    pass_id: int = 1,
    context_transition: bool = False,
    activity_transition: bool = False,
    annotator_id: str = "a1",
) -> WindowAnnotation:
    return WindowAnnotation(
        key=window_key(video_id, index),
        context=context,
        activity=activity,
        context_transition=context_transition,
        activity_transition=activity_transition,
        pass_id=pass_id,
        annotator_id=annotator_id,
        created_at="2025-01-01T00:00:00Z",
    )


def store_from_sequences(context_seqs: dict[str, list[str]] = None, activity_seqs: dict[str, list[str]] = None) -> LabelStore:
    """Build a store from per-video label sequences (contiguous indices)."""
    store = LabelStore()
    videos = set()
    if context_seqs:
        videos |= set(context_seqs)
    if activity_seqs:
        videos |= set(activity_seqs)
    for video_id in sorted(videos):
        ctx = (context_seqs or {}).get(video_id)
        act = (activity_seqs or {}).get(video_id)
        n = len(ctx) if ctx else len(act)
        for i in range(n):
            store.add_raw(
                annotation_for(
                    video_id,
                    i,
                    context=ctx[i] if ctx else "OUTDOOR",
                    activity=act[i] if act else "ROUTINE",
                )
            )
    return store
