"""Frame encoders: the frozen-encoder interface plus the backends the engine
ships with.

The production path plugs in precomputed embeddings (written next to the
corpus by whatever pretrained model the deployment uses) or an HTTP encoder
sidecar. The test-hash backend is a deterministic stand-in: a hash-seeded
fixed random projection of a thumbnail plus brightness/texture statistics, so
the full pipeline is exercisable without any pretrained weights.
"""

from __future__ import annotations

import json
import re
import urllib.request
from pathlib import Path
from typing import Mapping, Optional, Protocol

import cv2
import numpy as np

from .. import imgio
from ..prng import fnv1a64
from . import embfile

_TEST_HASH_RE = re.compile(r"^test-hash-(\d+)$")


class FrameEncoder(Protocol):
    encoder_id: str
    dim: int

    def encode(self, frame: np.ndarray) -> np.ndarray: ...


class HashProjectionEncoder:
    """Deterministic pseudo-encoder: same frame bytes, same vector.

    A mean-centered 16x16 luma thumbnail plus weighted global statistics
    (constant, brightness, spread, gradient energy, Laplacian variance) are
    projected through a fixed random matrix seeded from the encoder id.
    Centering keeps brightness out of the vector magnitude and in explicit
    coordinates instead, so appearance regimes remain linearly separable
    after the downstream l2 normalization.
    """

    THUMB = 16
    _STAT_WEIGHT = 4.0

    def __init__(self, encoder_id: str = "test-hash-64", dim: Optional[int] = None):
        if dim is None:
            m = _TEST_HASH_RE.match(encoder_id)
            if not m:
                raise ValueError(f"cannot infer dim from encoder id {encoder_id!r}")
            dim = int(m.group(1))
        self.encoder_id = encoder_id
        self.dim = dim
        n_in = self.THUMB * self.THUMB + 5
        rng = np.random.default_rng(fnv1a64(encoder_id))
        self._projection = rng.standard_normal((dim, n_in)) / np.sqrt(n_in)

    def encode(self, frame: np.ndarray) -> np.ndarray:
        gray = imgio.to_grayscale(frame)
        thumb = cv2.resize(gray, (self.THUMB, self.THUMB), interpolation=cv2.INTER_AREA) / 255.0
        gx = np.abs(np.diff(thumb, axis=1)).mean()
        gy = np.abs(np.diff(thumb, axis=0)).mean()
        lap_var = cv2.Laplacian(thumb, cv2.CV_64F).var()
        stats = np.array([1.0, thumb.mean(), thumb.std(), gx + gy, lap_var], dtype=np.float64)
        feat = np.concatenate([thumb.ravel() - thumb.mean(), self._STAT_WEIGHT * stats])
        return self._projection @ feat


class PrecomputedEmbeddings:
    """Embeddings read from an EMB1 file; lookup by (window key, frame slot)."""

    def __init__(self, path: str | Path, encoder_id: str = ""):
        self.path = Path(path)
        matrix, rows = embfile.read_embeddings(self.path)
        self._matrix = matrix.astype(np.float64)
        self._index = {(key, int(slot)): i for i, (key, slot) in enumerate(rows)}
        self.dim = matrix.shape[1]
        self.encoder_id = encoder_id or self.path.stem

    def has(self, key: str, slot: int) -> bool:
        return (key, slot) in self._index

    def lookup(self, key: str, slot: int) -> np.ndarray:
        try:
            return self._matrix[self._index[(key, slot)]]
        except KeyError as exc:
            raise KeyError(f"no precomputed embedding for {key} slot {slot}") from exc


class EndpointEncoder:
    """Encoder behind an HTTP sidecar: POST PGM bytes, receive a JSON vector.

    The sidecar owns the model; this client is intentionally dumb. Not safe to
    share across processes; wrap calls in the caller's worker when needed.
    """

    def __init__(self, encoder_id: str, url: str, dim: int, timeout_s: float = 30.0):
        self.encoder_id = encoder_id
        self.url = url
        self.dim = dim
        self.timeout_s = timeout_s

    def encode(self, frame: np.ndarray) -> np.ndarray:
        gray = imgio.to_uint8(imgio.to_grayscale(frame))
        h, w = gray.shape
        payload = b"P5\n" + f"{w} {h}\n255\n".encode("ascii") + gray.tobytes()
        req = urllib.request.Request(
            self.url, data=payload, headers={"Content-Type": "application/octet-stream"}
        )
        with urllib.request.urlopen(req, timeout=self.timeout_s) as resp:
            body = json.loads(resp.read().decode("utf-8"))
        vec = np.asarray(body["vector"], dtype=np.float64)
        if vec.shape != (self.dim,):
            raise ValueError(f"endpoint returned dim {vec.shape}, expected ({self.dim},)")
        return vec


def build_encoder(encoder_id: str, spec: Mapping) -> object:
    """Instantiate one encoder from its registry entry."""
    kind = spec.get("kind")
    if kind == "test-hash":
        return HashProjectionEncoder(encoder_id, dim=spec.get("dim"))
    if kind == "precomputed":
        return PrecomputedEmbeddings(spec["path"], encoder_id=encoder_id)
    if kind == "endpoint":
        return EndpointEncoder(encoder_id, url=spec["url"], dim=int(spec["dim"]))
    raise ValueError(f"unknown encoder kind {kind!r} for {encoder_id}")


def build_registry(specs: Mapping[str, Mapping]) -> dict[str, object]:
    return {encoder_id: build_encoder(encoder_id, spec) for encoder_id, spec in specs.items()}


def resolve_encoder(encoder_id: str, registry: Optional[Mapping[str, object]] = None) -> object:
    """Look up an encoder; bare ``test-hash-<dim>`` ids resolve implicitly."""
    if registry and encoder_id in registry:
        return registry[encoder_id]
    if _TEST_HASH_RE.match(encoder_id):
        return HashProjectionEncoder(encoder_id)
    raise KeyError(f"encoder {encoder_id!r} not in registry")
