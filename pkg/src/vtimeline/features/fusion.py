"""Per-block z-scoring and appearance+motion fusion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BLOCK_APPEARANCE = "clip"
BLOCK_FLOW = "flow"


@dataclass
class BlockStats:
    """Per-dimension mean and std fitted on one feature block.

    Constant dimensions record std 1 so reapplication is a plain subtraction;
    their z-scores are exactly zero on the fitting data.
    """

    block_id: str
    mean: np.ndarray
    std: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return (X - self.mean) / self.std

    def invert(self, Z: np.ndarray) -> np.ndarray:
        return np.atleast_2d(np.asarray(Z, dtype=np.float64)) * self.std + self.mean

    def to_dict(self) -> dict:
        return {"block_id": self.block_id, "mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, obj: dict) -> "BlockStats":
        return cls(
            block_id=obj["block_id"],
            mean=np.asarray(obj["mean"], dtype=np.float64),
            std=np.asarray(obj["std"], dtype=np.float64),
        )


def zscore_block(X: np.ndarray, block_id: str) -> tuple[np.ndarray, BlockStats]:
    """Standardize each dimension with population statistics.

    Dimensions with (numerically) zero spread come out as exact zeros and are
    recorded with std 1.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("z-scoring needs a matrix with at least 2 rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)  # population
    constant = std <= 1e-12 * np.maximum(1.0, np.abs(mean))
    std_recorded = np.where(constant, 1.0, std)
    Z = (X - mean) / std_recorded
    Z[:, constant] = 0.0
    return Z, BlockStats(block_id=block_id, mean=mean, std=std_recorded)


def apply_zscore(X: np.ndarray, stats: BlockStats) -> np.ndarray:
    """Reapply fitted stats to new rows (test data uses the stored mu/sigma)."""
    return stats.apply(X)


def fuse(clip_block: np.ndarray, flow_block: np.ndarray) -> np.ndarray:
    """Row-wise [appearance ; motion] concatenation; appearance comes first."""
    clip_block = np.atleast_2d(np.asarray(clip_block, dtype=np.float64))
    flow_block = np.atleast_2d(np.asarray(flow_block, dtype=np.float64))
    if clip_block.shape[0] != flow_block.shape[0]:
        raise ValueError(f"row mismatch: {clip_block.shape[0]} vs {flow_block.shape[0]}")
    if clip_block.shape[1] == 0 or flow_block.shape[1] == 0:
        raise ValueError("both blocks must be non-empty")
    return np.hstack([clip_block, flow_block])


@dataclass
class FusionStats:
    """The fitted per-block stats a fused model needs at inference time."""

    clip: BlockStats
    flow: BlockStats

    def transform(self, clip_rows: np.ndarray, flow_rows: np.ndarray) -> np.ndarray:
        return fuse(self.clip.apply(clip_rows), self.flow.apply(flow_rows))

    def to_dict(self) -> dict:
        return {"clip": self.clip.to_dict(), "flow": self.flow.to_dict()}

    @classmethod
    def from_dict(cls, obj: dict) -> "FusionStats":
        return cls(clip=BlockStats.from_dict(obj["clip"]), flow=BlockStats.from_dict(obj["flow"]))


def fit_fusion(clip_rows: np.ndarray, flow_rows: np.ndarray) -> tuple[np.ndarray, FusionStats]:
    """Fit per-block stats and return the fused training matrix."""
    clip_z, clip_stats = zscore_block(clip_rows, BLOCK_APPEARANCE)
    flow_z, flow_stats = zscore_block(flow_rows, BLOCK_FLOW)
    return fuse(clip_z, flow_z), FusionStats(clip=clip_stats, flow=flow_stats)
