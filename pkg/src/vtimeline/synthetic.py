"""Synthetic manifest-backed corpus generator for tests and demos.

Videos are smoothed-noise textures with a per-video brightness regime (the
stand-in for operational context) and one of two motion regimes: static, or a
constant horizontal translation with wraparound. Ground-truth labels for every
window are written alongside, so the full pipeline can be exercised end to end
without any real footage.

Run ``python -m vtimeline.synthetic --out demo_corpus`` to build a demo corpus.
"""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass
from pathlib import Path

import cv2
import numpy as np

from . import imgio
from .annotation import WindowAnnotation, LabelStore, export_csv
from .corpus import VideoRecord, READY, make_windows, window_key
from .prng import fnv1a64

MOTION_STATIC = "static"
MOTION_TRANSLATE = "translate"

# (context label, mean luma) regimes; far enough apart that appearance
# features separate them cleanly.
CONTEXT_REGIMES = [
    ("PATROL_VEHICLE", 45.0),
    ("OUTDOOR", 130.0),
    ("INDOOR", 215.0),
]

# (activity label, motion regime, px shift per source frame)
MOTION_REGIMES = [
    ("ROUTINE", MOTION_STATIC, 0),
    ("FOOT_PURSUIT", MOTION_TRANSLATE, 2),
]


@dataclass
class SyntheticVideoSpec:
    video_id: str
    context: str
    activity: str
    brightness: float
    motion: str
    shift_px: int
    duration_s: float
    fps: float = 2.0
    width: int = 320
    height: int = 180
    texture_sigma: float = 28.0


def smooth_texture(height: int, width: int, sigma: float, seed: int) -> np.ndarray:
    """Zero-mean smoothed noise texture with roughly the requested std."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((height, width))
    smoothed = cv2.GaussianBlur(noise, (0, 0), sigmaX=2.0)
    std = smoothed.std()
    if std > 0:
        smoothed *= sigma / std
    return smoothed


def write_video(root: Path, spec: SyntheticVideoSpec) -> VideoRecord:
    """Write one manifest-backed video; returns its READY record."""
    video_dir = root / spec.video_id
    frames_dir = video_dir / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)

    texture = smooth_texture(spec.height, spec.width, spec.texture_sigma, seed=fnv1a64(spec.video_id) & 0xFFFFFFFF)
    base = texture + spec.brightness

    n_frames = int(spec.duration_s * spec.fps)
    for i in range(n_frames):
        if spec.motion == MOTION_TRANSLATE:
            frame = np.roll(base, spec.shift_px * i, axis=1)
        else:
            frame = base
        imgio.write_netpbm(frames_dir / f"{i:06d}.pgm", imgio.to_uint8(frame))

    manifest = {
        "video_id": spec.video_id,
        "fps": spec.fps,
        "duration_s": spec.duration_s,
        "width": spec.width,
        "height": spec.height,
        "frame_pattern": "frames/%06d.pgm",
        "frame_count": n_frames,
    }
    (video_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return VideoRecord(
        video_id=spec.video_id,
        source_uri=str(video_dir),
        duration_s=spec.duration_s,
        fps=spec.fps,
        width=spec.width,
        height=spec.height,
        readiness=READY,
    )


def default_specs(n_videos: int = 12, duration_s: float = 80.0) -> list[SyntheticVideoSpec]:
    """Cycle through all context x motion regime combinations."""
    specs = []
    for i in range(n_videos):
        context, brightness = CONTEXT_REGIMES[i % len(CONTEXT_REGIMES)]
        activity, motion, shift = MOTION_REGIMES[(i // len(CONTEXT_REGIMES)) % len(MOTION_REGIMES)]
        specs.append(
            SyntheticVideoSpec(
                video_id=f"synth{i:02d}",
                context=context,
                activity=activity,
                brightness=brightness,
                motion=motion,
                shift_px=shift,
                duration_s=duration_s,
            )
        )
    return specs


def generate_corpus(
    root: str | Path,
    specs: list[SyntheticVideoSpec] | None = None,
    window_length_s: float = 10.0,
    annotator_id: str = "synthetic",
) -> tuple[list[VideoRecord], LabelStore]:
    """Write the corpus plus a fully labeled pass-1 store (labels.csv)."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    specs = specs if specs is not None else default_specs()

    records = []
    store = LabelStore()
    for spec in specs:
        record = write_video(root, spec)
        records.append(record)
        for win in make_windows(record, window_length_s):
            store.add(
                WindowAnnotation(
                    key=window_key(spec.video_id, win.index),
                    context=spec.context,
                    activity=spec.activity,
                    context_transition=False,
                    activity_transition=False,
                    pass_id=1,
                    annotator_id=annotator_id,
                    created_at="1970-01-01T00:00:00Z",
                )
            )
    export_csv(store, root / "labels.csv")
    return records, store


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Generate a synthetic demo corpus.")
    parser.add_argument("--out", required=True, help="corpus root directory")
    parser.add_argument("--videos", type=int, default=12)
    parser.add_argument("--duration", type=float, default=80.0, help="seconds per video")
    args = parser.parse_args(argv)
    records, store = generate_corpus(args.out, default_specs(args.videos, args.duration))
    print(f"wrote {len(records)} videos, {len(store)} labeled windows under {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
