"""Binary PGM (P5) / PPM (P6) image IO and grayscale conversion.

These two formats are the canonical frame interchange for manifest-backed
videos: 8-bit, uncompressed, bit-exact and parsable in any language. Readers
tolerate Netpbm comments and arbitrary header whitespace; writers emit a
canonical minimal header.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

# ITU-R BT.601 luma weights for RGB -> gray.
_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


class ImageFormatError(ValueError):
    """Raised when a PGM/PPM file cannot be parsed."""


def _read_header_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    # Skip whitespace and '#' comments, then read one whitespace-terminated token.
    n = len(buf)
    while pos < n:
        c = buf[pos : pos + 1]
        if c == b"#":
            while pos < n and buf[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not buf[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise ImageFormatError("truncated netpbm header")
    return buf[start:pos], pos


def read_netpbm(path: str | Path) -> np.ndarray:
    """Read a binary PGM/PPM file into a uint8 array (H,W) or (H,W,3)."""
    buf = Path(path).read_bytes()
    if len(buf) < 2:
        raise ImageFormatError(f"not a netpbm file: {path}")
    magic, pos = _read_header_token(buf, 0)
    if magic not in (b"P5", b"P6"):
        raise ImageFormatError(f"unsupported netpbm magic {magic!r} in {path}")
    fields = []
    for _ in range(3):
        token, pos = _read_header_token(buf, pos)
        try:
            fields.append(int(token))
        except ValueError as exc:
            raise ImageFormatError(f"bad netpbm header token {token!r}") from exc
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"bad netpbm dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise ImageFormatError(f"only 8-bit netpbm supported, maxval={maxval}")
    pos += 1  # single whitespace byte separates header from raster
    channels = 1 if magic == b"P5" else 3
    expected = width * height * channels
    raster = buf[pos : pos + expected]
    if len(raster) != expected:
        raise ImageFormatError(
            f"netpbm raster truncated: want {expected} bytes, have {len(raster)}"
        )
    img = np.frombuffer(raster, dtype=np.uint8)
    if channels == 1:
        return img.reshape(height, width).copy()
    return img.reshape(height, width, 3).copy()


def write_netpbm(path: str | Path, img: np.ndarray) -> None:
    """Write a uint8 array as P5 (2-D input) or P6 ((H,W,3) input)."""
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise ValueError("netpbm writer expects uint8 data")
    if img.ndim == 2:
        magic = b"P5"
        h, w = img.shape
    elif img.ndim == 3 and img.shape[2] == 3:
        magic = b"P6"
        h, w = img.shape[:2]
    else:
        raise ValueError(f"unsupported image shape {img.shape}")
    header = magic + b"\n" + f"{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.tobytes())


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Return a float64 (H,W) luma image in [0,255].

    RGB inputs use BT.601 weights; single-channel inputs pass through as-is.
    """
    img = np.asarray(img)
    if img.ndim == 2:
        return img.astype(np.float64)
    if img.ndim == 3 and img.shape[2] == 3:
        return img.astype(np.float64) @ _LUMA
    raise ValueError(f"unsupported image shape {img.shape}")


def to_uint8(img: np.ndarray) -> np.ndarray:
    """Round and clip a float image to uint8."""
    return np.clip(np.rint(np.asarray(img)), 0, 255).astype(np.uint8)
