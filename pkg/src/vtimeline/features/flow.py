"""Dense optical flow (Farnebäck two-frame method) and the 12-dimensional
window motion summary.

Flow estimation is delegated to cv2.calcOpticalFlowFarneback, which implements
the cited two-frame polynomial-expansion algorithm; the knobs exposed here map
1:1 onto it. Frames are resized to the working resolution before estimation.
All standard deviations are population standard deviations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import cv2
import numpy as np

from .. import imgio

# Pixels moving less than this are excluded from direction statistics.
COHERENCE_MIN_MAG = 0.1

_PYR_SCALE = 0.5  # fixed pyramid downscale between levels


@dataclass
class FlowParams:
    resize_w: int
    resize_h: int
    window_size: int
    pyramid_levels: int
    iterations: int
    poly_n: int = 7
    poly_sigma: float = 1.5

    def __post_init__(self):
        for name in ("resize_w", "resize_h", "window_size", "pyramid_levels", "iterations", "poly_n"):
            if getattr(self, name) <= 0:
                raise ValueError(f"FlowParams.{name} must be positive")
        if self.poly_sigma <= 0:
            raise ValueError("FlowParams.poly_sigma must be positive")

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class FlowPreset:
    name: str
    k: int
    params: FlowParams


# The six evaluated flow configurations (frames per window, working
# resolution, window size, pyramid levels, iterations).
FLOW_PRESETS = {
    "F1": FlowPreset("F1", 5, FlowParams(224, 126, 15, 3, 3)),
    "F2": FlowPreset("F2", 10, FlowParams(320, 180, 15, 3, 3)),
    "F3": FlowPreset("F3", 10, FlowParams(320, 180, 9, 3, 3)),
    "F4": FlowPreset("F4", 10, FlowParams(320, 180, 21, 3, 3)),
    "F5": FlowPreset("F5", 10, FlowParams(320, 180, 21, 4, 3)),
    "F6": FlowPreset("F6", 10, FlowParams(320, 180, 21, 3, 5)),
}


def resize_gray(frame: np.ndarray, params: FlowParams) -> np.ndarray:
    """Luma at the flow working resolution, float64 in [0,255]."""
    gray = imgio.to_grayscale(frame)
    if gray.shape != (params.resize_h, params.resize_w):
        gray = cv2.resize(gray, (params.resize_w, params.resize_h), interpolation=cv2.INTER_AREA)
    return gray


def farneback_flow(frame_a: np.ndarray, frame_b: np.ndarray, params: FlowParams) -> np.ndarray:
    """Per-pixel displacement (H,W,2) from frame_a to frame_b, px/frame-pair."""
    a = np.asarray(frame_a)
    b = np.asarray(frame_b)
    if a.shape != b.shape:
        raise ValueError(f"frame shapes differ: {a.shape} vs {b.shape}")
    prev_img = imgio.to_uint8(resize_gray(a, params))
    next_img = imgio.to_uint8(resize_gray(b, params))
    return cv2.calcOpticalFlowFarneback(
        prev_img,
        next_img,
        None,
        _PYR_SCALE,
        params.pyramid_levels,
        params.window_size,
        params.iterations,
        params.poly_n,
        params.poly_sigma,
        0,
    )


MOTION_FIELDS = (
    "mag_mean_mean",
    "mag_mean_std",
    "mag_std_mean",
    "mag_std_std",
    "dir_coherence_mean",
    "dir_coherence_std",
    "global_flow_mag_mean",
    "global_flow_mag_std",
    "luma_mean",
    "luma_std",
    "blur_proxy_mean",
    "n_frames",
)


@dataclass
class MotionSummary:
    mag_mean_mean: float
    mag_mean_std: float
    mag_std_mean: float
    mag_std_std: float
    dir_coherence_mean: float
    dir_coherence_std: float
    global_flow_mag_mean: float
    global_flow_mag_std: float
    luma_mean: float
    luma_std: float
    blur_proxy_mean: float
    n_frames: float

    def to_vector(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in MOTION_FIELDS], dtype=np.float64)


def _pair_stats(flow: np.ndarray) -> tuple[float, float, float, float]:
    u = flow[..., 0].astype(np.float64)
    v = flow[..., 1].astype(np.float64)
    mag = np.hypot(u, v)
    mask = mag > COHERENCE_MIN_MAG
    if np.any(mask):
        ux = (u[mask] / mag[mask]).mean()
        uy = (v[mask] / mag[mask]).mean()
        coherence = float(np.hypot(ux, uy))
    else:
        coherence = 0.0
    global_mag = float(np.hypot(u.mean(), v.mean()))
    return float(mag.mean()), float(mag.std()), coherence, global_mag


def motion_summary(
    flows: Sequence[np.ndarray],
    frames: Sequence[np.ndarray],
    k: int,
) -> MotionSummary:
    """Summarize a window's flow fields and frame quality into 12 statistics.

    ``frames`` are the successfully decoded grayscale frames at the working
    resolution; ``flows`` are the fields between their consecutive pairs. With
    fewer than two decoded frames the eight flow-derived statistics are zero
    while luma/blur/n_frames are retained.
    """
    n_frames = len(frames)
    if n_frames > k:
        raise ValueError(f"{n_frames} frames decoded but K={k}")
    if n_frames >= 2 and len(flows) != n_frames - 1:
        raise ValueError(f"expected {n_frames - 1} flow fields, got {len(flows)}")

    if n_frames >= 2 and flows:
        per_pair = np.array([_pair_stats(f) for f in flows], dtype=np.float64)
        mag_means, mag_stds, coherences, global_mags = per_pair.T
        flow_stats = [
            float(mag_means.mean()),
            float(mag_means.std()),
            float(mag_stds.mean()),
            float(mag_stds.std()),
            float(coherences.mean()),
            float(coherences.std()),
            float(global_mags.mean()),
            float(global_mags.std()),
        ]
    else:
        flow_stats = [0.0] * 8

    if n_frames:
        lumas = np.array([float(np.mean(f)) for f in frames])
        luma_mean = float(lumas.mean())
        luma_std = float(lumas.std())
        blur = float(np.mean([cv2.Laplacian(np.asarray(f, dtype=np.float64), cv2.CV_64F).var() for f in frames]))
    else:
        luma_mean = luma_std = blur = 0.0

    return MotionSummary(*flow_stats, luma_mean, luma_std, blur, float(n_frames))


def window_motion_summary(
    images: Sequence[np.ndarray],
    params: FlowParams,
    k: int,
) -> MotionSummary:
    """Resize decoded frames, run flow between consecutive pairs, summarize."""
    grays = [resize_gray(img, params) for img in images]
    flows = []
    for a, b in zip(grays, grays[1:]):
        flows.append(
            cv2.calcOpticalFlowFarneback(
                imgio.to_uint8(a),
                imgio.to_uint8(b),
                None,
                _PYR_SCALE,
                params.pyramid_levels,
                params.window_size,
                params.iterations,
                params.poly_n,
                params.poly_sigma,
                0,
            )
        )
    return motion_summary(flows, grays, k)


def motion_layout(preset_name: Optional[str], k: int) -> str:
    preset = f"preset={preset_name}," if preset_name else ""
    return (
        f"flow12[{preset}K={k}]:"
        + ",".join(MOTION_FIELDS)
        + f";coherence_min_mag={COHERENCE_MIN_MAG}px;blur=laplacian3x3_variance;stats=population"
    )
