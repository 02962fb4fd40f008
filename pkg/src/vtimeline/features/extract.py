"""Corpus-level feature extraction: one row per window, one table per run.

Window-level extraction is embarrassingly parallel across videos; everything
here is pure given readable sources. Appearance kinds skip windows with zero
decodable frames (reported back to the caller); the flow kind never skips
because the motion summary zero-fills short windows by definition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from ..corpus import FrameSource, Window, load_frames
from .embeddings import l2_normalize, pool, temporal_deltas
from .encoders import PrecomputedEmbeddings, resolve_encoder
from .flow import FLOW_PRESETS, FlowParams, motion_layout, window_motion_summary

KIND_CLIP = "clip"
KIND_CLIP_DELTA = "clip_delta"
KIND_FLOW = "flow"
KIND_FUSED = "fused"
ATOMIC_KINDS = (KIND_CLIP, KIND_CLIP_DELTA, KIND_FLOW)


@dataclass
class FeatureSpec:
    """One atomic per-window representation (appearance or motion)."""

    kind: str
    k: int
    pooling: str = "mean"
    encoder_id: Optional[str] = None
    flow_preset: Optional[str] = None
    flow_params: Optional[FlowParams] = None

    def __post_init__(self):
        if self.kind not in ATOMIC_KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("K must be >= 1")
        if self.kind in (KIND_CLIP, KIND_CLIP_DELTA) and not self.encoder_id:
            raise ValueError(f"{self.kind} features need an encoder_id")
        if self.kind == KIND_FLOW and self.flow_params is None:
            preset = FLOW_PRESETS.get(self.flow_preset or "")
            if preset is None:
                raise ValueError("flow features need a flow preset or explicit params")
            self.flow_params = preset.params

    def layout(self) -> str:
        if self.kind == KIND_CLIP:
            return f"clip[pool={self.pooling},K={self.k}]:{self.encoder_id}"
        if self.kind == KIND_CLIP_DELTA:
            return (
                f"clip_delta[pool={self.pooling},K={self.k}]:{self.encoder_id}"
                ";+mean_cos_dist,max_cos_dist,mean_dim_std"
            )
        return motion_layout(self.flow_preset, self.k)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "k": self.k,
            "pooling": self.pooling,
            "encoder_id": self.encoder_id,
            "flow_preset": self.flow_preset,
        }
        if self.flow_params is not None:
            out["flow_params"] = self.flow_params.to_dict()
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "FeatureSpec":
        params = obj.get("flow_params")
        return cls(
            kind=obj["kind"],
            k=int(obj["k"]),
            pooling=obj.get("pooling", "mean"),
            encoder_id=obj.get("encoder_id"),
            flow_preset=obj.get("flow_preset"),
            flow_params=FlowParams(**params) if params else None,
        )


@dataclass
class FusedSpec:
    """An appearance spec and a flow spec whose z-scored blocks get fused.

    The two branches keep their own K (the evaluated fusions pair runs with
    different frame counts).
    """

    appearance: FeatureSpec
    flow: FeatureSpec

    def __post_init__(self):
        if self.appearance.kind not in (KIND_CLIP, KIND_CLIP_DELTA):
            raise ValueError("fused appearance branch must be clip or clip_delta")
        if self.flow.kind != KIND_FLOW:
            raise ValueError("fused flow branch must be flow")

    @property
    def kind(self) -> str:
        return KIND_FUSED

    @property
    def encoder_id(self) -> Optional[str]:
        return self.appearance.encoder_id

    def layout(self) -> str:
        return f"fused[zscore=per-block]({self.appearance.layout()})+({self.flow.layout()})"

    def to_dict(self) -> dict:
        return {"kind": KIND_FUSED, "appearance": self.appearance.to_dict(), "flow": self.flow.to_dict()}

    @classmethod
    def from_dict(cls, obj: dict) -> "FusedSpec":
        return cls(
            appearance=FeatureSpec.from_dict(obj["appearance"]),
            flow=FeatureSpec.from_dict(obj["flow"]),
        )


AnySpec = Union[FeatureSpec, FusedSpec]


def spec_from_dict(obj: dict) -> AnySpec:
    if obj.get("kind") == KIND_FUSED:
        return FusedSpec.from_dict(obj)
    return FeatureSpec.from_dict(obj)


@dataclass
class FeatureTable:
    """Rows aligned with keys; appearance extraction may skip windows."""

    matrix: np.ndarray
    keys: list[str]
    layout: str
    spec: AnySpec
    skipped_keys: list[str] = field(default_factory=list)

    def row_index(self) -> dict[str, int]:
        return {key: i for i, key in enumerate(self.keys)}

    def select(self, keys: Sequence[str]) -> np.ndarray:
        index = self.row_index()
        return self.matrix[[index[k] for k in keys]]


def window_appearance_vectors(
    window: Window,
    source: FrameSource,
    encoder,
    k: int,
) -> list[np.ndarray]:
    """Per-frame normalized embeddings for one window (may be empty)."""
    refs, frames = load_frames(window, k, source)
    if isinstance(encoder, PrecomputedEmbeddings):
        vectors = [
            encoder.lookup(window.key, ref.frame_slot)
            for ref in refs
            if ref.decode_ok and encoder.has(window.key, ref.frame_slot)
        ]
    else:
        vectors = [encoder.encode(frame) for frame in frames]
    return [l2_normalize(v) for v in vectors]


def window_appearance_row(
    window: Window,
    source: FrameSource,
    encoder,
    spec: FeatureSpec,
) -> Optional[np.ndarray]:
    vectors = window_appearance_vectors(window, source, encoder, spec.k)
    if not vectors:
        return None
    pooled = pool(vectors, spec.pooling).vector
    if spec.kind == KIND_CLIP:
        return pooled
    deltas = temporal_deltas(vectors)
    return np.concatenate([pooled, deltas.to_vector()])


def window_flow_row(window: Window, source: FrameSource, spec: FeatureSpec) -> np.ndarray:
    refs, frames = load_frames(window, spec.k, source)
    summary = window_motion_summary(frames, spec.flow_params, spec.k)
    return summary.to_vector()


def extract_features(
    sources: Mapping[str, FrameSource],
    windows: Sequence[Window],
    spec: AnySpec,
    encoders: Optional[Mapping[str, object]] = None,
) -> FeatureTable:
    """Compute one feature row per window, in the given window order.

    Fused specs return the raw [appearance ; flow] rows without z-scoring;
    block standardization is the consumer's job because the fitting scope
    (train rows vs whole dataset) depends on the use.
    """
    if isinstance(spec, FusedSpec):
        app = extract_features(sources, windows, spec.appearance, encoders)
        flo = extract_features(sources, windows, spec.flow, encoders)
        flow_by_key = flo.row_index()
        rows = [
            np.concatenate([app.matrix[i], flo.matrix[flow_by_key[key]]])
            for i, key in enumerate(app.keys)
        ]
        return FeatureTable(
            matrix=np.array(rows) if rows else np.zeros((0, 0)),
            keys=app.keys,
            layout=spec.layout(),
            spec=spec,
            skipped_keys=app.skipped_keys,
        )

    encoder = None
    if spec.kind in (KIND_CLIP, KIND_CLIP_DELTA):
        encoder = resolve_encoder(spec.encoder_id, encoders)

    rows = []
    keys = []
    skipped = []
    for window in windows:
        source = sources[window.video_id]
        if spec.kind == KIND_FLOW:
            row = window_flow_row(window, source, spec)
        else:
            row = window_appearance_row(window, source, encoder, spec)
            if row is None:
                skipped.append(window.key)
                continue
        rows.append(row)
        keys.append(window.key)
    matrix = np.array(rows) if rows else np.zeros((0, 0))
    return FeatureTable(matrix=matrix, keys=keys, layout=spec.layout(), spec=spec, skipped_keys=skipped)


def extract_frame_embeddings(
    sources: Mapping[str, FrameSource],
    windows: Sequence[Window],
    encoder,
    k: int,
) -> tuple[np.ndarray, list[tuple[str, int]]]:
    """Raw per-frame embeddings (unnormalized), for precomputed-encoder files."""
    rows = []
    mapping = []
    for window in windows:
        source = sources[window.video_id]
        refs, frames = load_frames(window, k, source)
        decoded = [r for r in refs if r.decode_ok]
        for ref, frame in zip(decoded, frames):
            rows.append(encoder.encode(frame))
            mapping.append((window.key, ref.frame_slot))
    matrix = np.array(rows) if rows else np.zeros((0, getattr(encoder, "dim", 0)))
    return matrix, mapping
