"""Binary vector files.

Embedding file (per-frame rows):
    magic b"EMB1" | u32 d | u32 count | count*d little-endian f32
Feature file (per-window rows), same layout plus a layout-string header field:
    magic b"EMF1" | u32 d | u32 count | u32 n | n bytes UTF-8 layout | rows

Each file has a JSON sidecar at ``<path>.json`` mapping rows to window keys
(and frame slots for embeddings) so the binary stays dumb and auditable.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC_EMBEDDINGS = b"EMB1"
MAGIC_FEATURES = b"EMF1"


def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".json")


def write_embeddings(path: str | Path, matrix: np.ndarray, rows: list[tuple[str, int]]) -> None:
    matrix = np.atleast_2d(np.asarray(matrix))
    if matrix.shape[0] != len(rows):
        raise ValueError(f"{matrix.shape[0]} rows but {len(rows)} row mappings")
    with open(path, "wb") as fh:
        fh.write(MAGIC_EMBEDDINGS)
        fh.write(struct.pack("<II", matrix.shape[1], matrix.shape[0]))
        fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())
    sidecar_path(path).write_text(
        json.dumps({"rows": [[key, slot] for key, slot in rows]}, indent=2) + "\n",
        encoding="utf-8",
    )


def read_embeddings(path: str | Path) -> tuple[np.ndarray, list[tuple[str, int]]]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC_EMBEDDINGS:
            raise ValueError(f"bad embedding-file magic {magic!r}")
        d, count = struct.unpack("<II", fh.read(8))
        matrix = np.frombuffer(fh.read(4 * d * count), dtype="<f4").reshape(count, d)
    meta = json.loads(sidecar_path(path).read_text(encoding="utf-8"))
    rows = [(key, int(slot)) for key, slot in meta["rows"]]
    if len(rows) != count:
        raise ValueError(f"sidecar lists {len(rows)} rows, file holds {count}")
    return matrix.copy(), rows


def write_features(
    path: str | Path,
    matrix: np.ndarray,
    keys: list[str],
    layout: str,
    spec: dict | None = None,
) -> None:
    matrix = np.atleast_2d(np.asarray(matrix))
    if matrix.shape[0] != len(keys):
        raise ValueError(f"{matrix.shape[0]} rows but {len(keys)} keys")
    layout_bytes = layout.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC_FEATURES)
        fh.write(struct.pack("<II", matrix.shape[1], matrix.shape[0]))
        fh.write(struct.pack("<I", len(layout_bytes)))
        fh.write(layout_bytes)
        fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())
    sidecar = {"layout": layout, "keys": keys}
    if spec is not None:
        sidecar["spec"] = spec
    sidecar_path(path).write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")


def read_features(path: str | Path) -> tuple[np.ndarray, list[str], str, dict | None]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC_FEATURES:
            raise ValueError(f"bad feature-file magic {magic!r}")
        d, count = struct.unpack("<II", fh.read(8))
        (n_layout,) = struct.unpack("<I", fh.read(4))
        layout = fh.read(n_layout).decode("utf-8")
        matrix = np.frombuffer(fh.read(4 * d * count), dtype="<f4").reshape(count, d)
    meta = json.loads(sidecar_path(path).read_text(encoding="utf-8"))
    keys = list(meta["keys"])
    if len(keys) != count:
        raise ValueError(f"sidecar lists {len(keys)} keys, file holds {count}")
    if meta.get("layout") != layout:
        raise ValueError("sidecar layout disagrees with binary header")
    return matrix.copy(), keys, layout, meta.get("spec")
