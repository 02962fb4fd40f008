"""Multiclass softmax classifiers, video-level splits, and threshold fallback.

Training minimizes L2-regularized multinomial cross-entropy by full-batch
gradient descent with backtracking (Armijo) line search: dependency-free,
deterministic, and order-invariant over training rows. The bias is not
regularized. Trained classifiers are immutable and safe for concurrent
inference; multiple models may train in parallel.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .prng import Xoshiro256StarStar

BALANCE_NONE = "NONE"
BALANCE_INVERSE_FREQ = "INVERSE_FREQ"


@dataclass
class TrainConfig:
    l2_lambda: float = 1e-3
    max_iters: int = 500
    grad_tolerance: float = 1e-6
    seed: int = 0
    balance: str = BALANCE_NONE

    def __post_init__(self):
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be >= 0")
        if self.balance not in (BALANCE_NONE, BALANCE_INVERSE_FREQ):
            raise ValueError(f"unknown balance mode {self.balance!r}")

    def to_dict(self) -> dict:
        return self.__dict__.copy()

    @classmethod
    def from_dict(cls, obj: dict) -> "TrainConfig":
        return cls(**obj)


@dataclass
class SoftmaxClassifier:
    weights: np.ndarray  # (C, dim)
    bias: np.ndarray  # (C,)
    class_order: list[str]
    train_config: TrainConfig
    train_report: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    def predict_prob(self, x: np.ndarray) -> np.ndarray:
        """softmax(Wx + b) in fixed class order; accepts one row or a matrix."""
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        if X.shape[1] != self.dim:
            raise ValueError(f"feature dim {X.shape[1]} != model dim {self.dim}")
        probs = _softmax(X @ self.weights.T + self.bias)
        return probs[0] if single else probs

    def predict(self, X: np.ndarray) -> list["Prediction"]:
        probs = np.atleast_2d(self.predict_prob(X))
        out = []
        for row in probs:
            arg = int(np.argmax(row))
            out.append(Prediction(probs=row, label=self.class_order[arg], score=float(row[arg])))
        return out


@dataclass
class Prediction:
    probs: np.ndarray
    label: str
    score: float

    def thresholded(self, tau: float, fallback_label: str) -> str:
        return apply_threshold(self, tau, fallback_label)


def apply_threshold(pred: Prediction, tau: float, fallback_label: str) -> str:
    """Fallback label when the top probability falls below tau."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must be in [0, 1]")
    return fallback_label if pred.score < tau else pred.label


def _softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    expz = np.exp(Z)
    return expz / expz.sum(axis=1, keepdims=True)


def _log_softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    return Z - np.log(np.exp(Z).sum(axis=1, keepdims=True))


def softmax_loss_grad(
    W: np.ndarray,
    b: np.ndarray,
    X: np.ndarray,
    Y: np.ndarray,
    sample_weights: np.ndarray,
    l2_lambda: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Weighted mean cross-entropy + 0.5*lambda*||W||_F^2 and its gradient."""
    n = X.shape[0]
    Z = X @ W.T + b
    logp = _log_softmax(Z)
    ce = -np.sum(sample_weights * np.sum(Y * logp, axis=1)) / n
    loss = ce + 0.5 * l2_lambda * float(np.sum(W * W))
    P = np.exp(logp)
    D = (P - Y) * sample_weights[:, None]
    grad_W = D.T @ X / n + l2_lambda * W
    grad_b = D.sum(axis=0) / n
    return float(loss), grad_W, grad_b


def _sample_weights(y_idx: np.ndarray, n_classes: int, balance: str) -> np.ndarray:
    n = len(y_idx)
    if balance == BALANCE_NONE:
        return np.ones(n)
    counts = np.bincount(y_idx, minlength=n_classes).astype(np.float64)
    present = counts > 0
    # n / (k * count_c) sums to n over the dataset, keeping losses comparable.
    k = int(present.sum())
    weights = np.zeros(n_classes)
    weights[present] = n / (k * counts[present])
    return weights[y_idx]


def train_softmax(
    X: np.ndarray,
    y: Sequence[str],
    config: Optional[TrainConfig] = None,
    class_order: Optional[Sequence[str]] = None,
) -> SoftmaxClassifier:
    """Fit h(x) = softmax(Wx + b) on labeled feature rows.

    With class_order omitted it defaults to the sorted distinct labels; a
    single-class input then yields a constant predictor with probability
    exactly 1. The train report records iterations, losses, and the final
    gradient infinity-norm; convergence is declared only below grad_tolerance.
    """
    config = config or TrainConfig()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D matrix")
    y = list(y)
    if len(y) != X.shape[0]:
        raise ValueError(f"{X.shape[0]} rows but {len(y)} labels")
    if class_order is None:
        class_order = sorted(set(y))
    class_order = list(class_order)
    index = {lab: i for i, lab in enumerate(class_order)}
    unknown = sorted(set(y) - set(index))
    if unknown:
        raise ValueError(f"labels outside class order: {unknown}")
    if len(y) < len(class_order):
        raise ValueError(f"need at least {len(class_order)} rows for {len(class_order)} classes")

    n, dim = X.shape
    C = len(class_order)
    y_idx = np.array([index[lab] for lab in y])
    Y = np.zeros((n, C))
    Y[np.arange(n), y_idx] = 1.0
    weights = _sample_weights(y_idx, C, config.balance)

    # Optimize on column-standardized features for conditioning (feature
    # scales in this pipeline span orders of magnitude), then fold the affine
    # transform back so the stored weights act on raw feature space.
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    sigma = np.where(sigma <= 1e-12 * np.maximum(1.0, np.abs(mu)), 1.0, sigma)
    X = (X - mu) / sigma

    W = np.zeros((C, dim))
    b = np.zeros(C)
    loss, grad_W, grad_b = softmax_loss_grad(W, b, X, Y, weights, config.l2_lambda)
    initial_loss = loss
    step = 1.0
    iterations = 0
    converged = False
    for _ in range(config.max_iters):
        grad_inf = max(float(np.abs(grad_W).max(initial=0.0)), float(np.abs(grad_b).max(initial=0.0)))
        if grad_inf < config.grad_tolerance:
            converged = True
            break
        grad_sq = float(np.sum(grad_W * grad_W) + np.sum(grad_b * grad_b))
        t = step
        for _ in range(60):
            new_loss, _, _ = _loss_only(W - t * grad_W, b - t * grad_b, X, Y, weights, config.l2_lambda)
            if new_loss <= loss - 1e-4 * t * grad_sq:
                break
            t *= 0.5
        else:
            break  # no descent step found; numerically done
        W = W - t * grad_W
        b = b - t * grad_b
        step = t * 2.0
        loss, grad_W, grad_b = softmax_loss_grad(W, b, X, Y, weights, config.l2_lambda)
        iterations += 1
    final_grad_inf = max(float(np.abs(grad_W).max(initial=0.0)), float(np.abs(grad_b).max(initial=0.0)))
    report = {
        "iterations": iterations,
        "initial_loss": initial_loss,
        "final_loss": loss,
        "final_grad_inf": final_grad_inf,
        "converged": converged or final_grad_inf < config.grad_tolerance,
    }
    W_raw = W / sigma
    b_raw = b - W_raw @ mu
    return SoftmaxClassifier(
        weights=W_raw, bias=b_raw, class_order=class_order, train_config=config, train_report=report
    )


def _loss_only(W, b, X, Y, weights, l2_lambda) -> tuple[float, None, None]:
    n = X.shape[0]
    logp = _log_softmax(X @ W.T + b)
    ce = -np.sum(weights * np.sum(Y * logp, axis=1)) / n
    return ce + 0.5 * l2_lambda * float(np.sum(W * W)), None, None


# ---------------------------------------------------------------------------
# Video-level splits


@dataclass
class Split:
    train_video_ids: tuple[str, ...]
    test_video_ids: tuple[str, ...]
    seed: int
    test_fraction: float

    def side(self, video_id: str) -> str:
        if video_id in self.test_video_ids:
            return "test"
        if video_id in self.train_video_ids:
            return "train"
        raise KeyError(f"video {video_id} not in split")

    def to_dict(self) -> dict:
        return {
            "train_video_ids": list(self.train_video_ids),
            "test_video_ids": list(self.test_video_ids),
            "seed": self.seed,
            "test_fraction": self.test_fraction,
        }


def video_level_split(video_ids: Sequence[str], test_fraction: float, seed: int) -> Split:
    """Deterministic seeded split; every window inherits its video's side."""
    ids = sorted(set(video_ids))
    if len(ids) < 2:
        raise ValueError("need at least 2 videos to split")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = Xoshiro256StarStar(seed)
    shuffled = list(ids)
    rng.shuffle(shuffled)
    n_test = math.ceil(test_fraction * len(ids))
    test = tuple(sorted(shuffled[:n_test]))
    train = tuple(sorted(shuffled[n_test:]))
    return Split(train_video_ids=train, test_video_ids=test, seed=seed, test_fraction=test_fraction)


# ---------------------------------------------------------------------------
# Model files


@dataclass
class ModelBundle:
    """A trained classifier plus everything needed to reapply it."""

    classifier: SoftmaxClassifier
    feature_spec: dict
    feature_layout: str
    encoder_id: Optional[str]
    fusion_stats: Optional[dict] = None


def save_model(
    path: str | Path,
    classifier: SoftmaxClassifier,
    feature_spec: dict,
    feature_layout: str,
    encoder_id: Optional[str] = None,
    fusion_stats: Optional[dict] = None,
) -> None:
    """Write the model as auditable JSON (weights row-major)."""
    obj = {
        "class_order": classifier.class_order,
        "dim": classifier.dim,
        "W": [list(map(float, row)) for row in classifier.weights],
        "b": [float(v) for v in classifier.bias],
        "train_config": classifier.train_config.to_dict(),
        "train_report": classifier.train_report,
        "feature_layout_string": feature_layout,
        "feature_spec": feature_spec,
        "encoder_id": encoder_id,
    }
    if fusion_stats is not None:
        obj["fusion_stats"] = fusion_stats
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> ModelBundle:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    classifier = SoftmaxClassifier(
        weights=np.asarray(obj["W"], dtype=np.float64),
        bias=np.asarray(obj["b"], dtype=np.float64),
        class_order=list(obj["class_order"]),
        train_config=TrainConfig.from_dict(obj["train_config"]),
        train_report=obj.get("train_report", {}),
    )
    if classifier.weights.shape[1] != int(obj["dim"]):
        raise ValueError("model dim disagrees with weight matrix")
    return ModelBundle(
        classifier=classifier,
        feature_spec=obj["feature_spec"],
        feature_layout=obj["feature_layout_string"],
        encoder_id=obj.get("encoder_id"),
        fusion_stats=obj.get("fusion_stats"),
    )
