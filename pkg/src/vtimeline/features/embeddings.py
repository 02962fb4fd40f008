"""Embedding normalization, deterministic pooling, and temporal-stability
scalars computed from per-frame embeddings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

POOL_MEAN = "mean"
POOL_MAX = "max"

_NORM_EPS = 1e-12
_UNIT_TOL = 1e-6


def l2_normalize(v: np.ndarray, eps: float = _NORM_EPS) -> np.ndarray:
    """v / ||v||_2; near-zero vectors are an error, never silently zeroed."""
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm <= eps:
        raise ValueError(f"cannot normalize near-zero vector (norm={norm:g})")
    return v / norm


@dataclass
class PooledDescriptor:
    vector: np.ndarray
    pooling: str
    k_used: int


def _stack_normalized(embeddings: Sequence[np.ndarray]) -> np.ndarray:
    if len(embeddings) == 0:
        raise ValueError("no embeddings to pool")
    matrix = np.stack([np.asarray(e, dtype=np.float64) for e in embeddings])
    if matrix.ndim != 2:
        raise ValueError("embeddings must share one dimensionality")
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
        worst = float(np.abs(norms - 1.0).max())
        raise ValueError(f"embeddings must be l2-normalized (max deviation {worst:g})")
    return matrix


def pool(embeddings: Sequence[np.ndarray], mode: str) -> PooledDescriptor:
    """Aggregate normalized frame embeddings into one window descriptor.

    MEAN is the coordinate-wise mean, MAX the coordinate-wise max; the result
    is deliberately not re-normalized.
    """
    matrix = _stack_normalized(embeddings)
    if mode == POOL_MEAN:
        vec = matrix.mean(axis=0)
    elif mode == POOL_MAX:
        vec = matrix.max(axis=0)
    else:
        raise ValueError(f"unknown pooling mode {mode!r}")
    return PooledDescriptor(vector=vec, pooling=mode, k_used=matrix.shape[0])


@dataclass
class TemporalDeltas:
    """Stability scalars over consecutive frame embeddings; all zero when
    fewer than two frames contributed."""

    mean_cos_dist: float
    max_cos_dist: float
    mean_dim_std: float

    def to_vector(self) -> np.ndarray:
        return np.array([self.mean_cos_dist, self.max_cos_dist, self.mean_dim_std])


def temporal_deltas(embeddings: Sequence[np.ndarray]) -> TemporalDeltas:
    matrix = _stack_normalized(embeddings)
    if matrix.shape[0] < 2:
        return TemporalDeltas(0.0, 0.0, 0.0)
    dots = np.sum(matrix[:-1] * matrix[1:], axis=1)
    dists = 1.0 - dots
    # Bit-identical frames must report exact zeros, not unit-norm rounding noise.
    dists[np.abs(dists) < 1e-12] = 0.0
    dim_std = matrix.std(axis=0)  # population
    mean_std = float(dim_std.mean())
    return TemporalDeltas(
        mean_cos_dist=float(dists.mean()),
        max_cos_dist=float(dists.max()),
        mean_dim_std=0.0 if mean_std < 1e-12 else mean_std,
    )
