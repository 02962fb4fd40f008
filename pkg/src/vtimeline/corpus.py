"""Corpus readiness probing, fixed-length windowing, frame sampling, plans.

A video source is either a container file decoded through cv2 (form A) or a
directory holding ``manifest.json`` plus PGM/PPM frames named by frame index
(form B, the canonical test form). Every downstream stage addresses content
through 10-second windows and their string keys.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import imgio
from .prng import Xoshiro256StarStar, derive_stream_seed

DEFAULT_WINDOW_S = 10.0

READY = "READY"
UNREADABLE = "UNREADABLE"
NO_DECODABLE_FRAME = "NO_DECODABLE_FRAME"

_KEY_RE = re.compile(r"^(?P<video>.+):(?P<index>\d{5,})$")


@dataclass
class VideoRecord:
    video_id: str
    source_uri: str
    duration_s: float
    fps: float
    width: int
    height: int
    readiness: str

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "source_uri": self.source_uri,
            "duration_s": self.duration_s,
            "fps": self.fps,
            "width": self.width,
            "height": self.height,
            "readiness": self.readiness,
        }


def window_key(video_id: str, index: int) -> str:
    """Canonical window key ``videoId:index`` with a zero-padded 5-digit index."""
    if index < 0:
        raise ValueError("window index must be >= 0")
    return f"{video_id}:{index:05d}"


def parse_window_key(key: str) -> tuple[str, int]:
    m = _KEY_RE.match(key)
    if not m:
        raise ValueError(f"malformed window key: {key!r}")
    return m.group("video"), int(m.group("index"))


@dataclass
class Window:
    video_id: str
    index: int
    start_time_s: float
    end_time_s: float

    @property
    def key(self) -> str:
        return window_key(self.video_id, self.index)

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "video_id": self.video_id,
            "index": self.index,
            "start_time_s": self.start_time_s,
            "end_time_s": self.end_time_s,
        }


@dataclass
class FrameRef:
    """One sampled frame slot inside a window.

    ``timestamp_s`` is the sampling target (strictly increasing across slots);
    ``frame_index`` is the decoded source frame chosen at-or-after the target,
    or None when nothing decodable exists before the window end.
    """

    key: str
    frame_slot: int
    timestamp_s: float
    decode_ok: bool
    frame_index: Optional[int] = None


@dataclass
class SamplingPlan:
    video_id: str
    seed: int
    k_cov: int
    k_rand: int
    coverage_indices: list[int]
    random_indices: list[int]

    @property
    def quota(self) -> int:
        return self.k_cov + self.k_rand

    @property
    def selected_indices(self) -> list[int]:
        return sorted(set(self.coverage_indices) | set(self.random_indices))

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "seed": self.seed,
            "k_cov": self.k_cov,
            "k_rand": self.k_rand,
            "quota": self.quota,
            "coverage_indices": self.coverage_indices,
            "random_indices": self.random_indices,
        }


@dataclass
class WindowInventory:
    """Window counts per video; the referential-integrity source of truth."""

    window_length_s: float
    videos: dict[str, int] = field(default_factory=dict)

    def n_windows(self, video_id: str) -> int:
        return self.videos.get(video_id, 0)

    def resolves(self, key: str) -> bool:
        try:
            video_id, index = parse_window_key(key)
        except ValueError:
            return False
        return index < self.videos.get(video_id, 0)

    def all_keys(self) -> list[str]:
        keys = []
        for video_id in sorted(self.videos):
            keys.extend(window_key(video_id, i) for i in range(self.videos[video_id]))
        return keys

    def to_dict(self) -> dict:
        return {"window_length_s": self.window_length_s, "videos": dict(sorted(self.videos.items()))}

    @classmethod
    def from_dict(cls, obj: dict) -> "WindowInventory":
        return cls(window_length_s=float(obj["window_length_s"]), videos={k: int(v) for k, v in obj["videos"].items()})

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "WindowInventory":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


class FrameSource:
    """Read access to decoded frames of one video."""

    record: VideoRecord

    def read_frame(self, frame_index: int) -> Optional[np.ndarray]:
        raise NotImplementedError

    def frame_timestamp(self, frame_index: int) -> float:
        return frame_index / self.record.fps

    def frame_at_or_after(self, t: float) -> int:
        """Index of the nearest frame at or after wall-clock time t."""
        return max(0, math.ceil(t * self.record.fps - 1e-9))


class ManifestFrameSource(FrameSource):
    """Form B: directory with manifest.json and index-named PGM/PPM frames."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        manifest_path = self.root / "manifest.json"
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        self.frame_pattern = manifest["frame_pattern"]
        self.frame_count = int(manifest.get("frame_count", 0))
        self.record = VideoRecord(
            video_id=manifest["video_id"],
            source_uri=str(self.root),
            duration_s=float(manifest["duration_s"]),
            fps=float(manifest["fps"]),
            width=int(manifest["width"]),
            height=int(manifest["height"]),
            readiness=READY,
        )

    def frame_path(self, frame_index: int) -> Path:
        return self.root / (self.frame_pattern % frame_index)

    def read_frame(self, frame_index: int) -> Optional[np.ndarray]:
        if frame_index < 0:
            return None
        path = self.frame_path(frame_index)
        if not path.exists():
            return None
        try:
            return imgio.read_netpbm(path)
        except imgio.ImageFormatError:
            return None


class VideoFileSource(FrameSource):
    """Form A: container file decoded through cv2 (the external decoder client)."""

    def __init__(self, path: str | Path):
        import cv2

        self.path = Path(path)
        self._cv2 = cv2
        cap = cv2.VideoCapture(str(self.path))
        if not cap.isOpened():
            raise IOError(f"decoder could not open {self.path}")
        fps = cap.get(cv2.CAP_PROP_FPS) or 0.0
        frame_count = int(cap.get(cv2.CAP_PROP_FRAME_COUNT) or 0)
        width = int(cap.get(cv2.CAP_PROP_FRAME_WIDTH) or 0)
        height = int(cap.get(cv2.CAP_PROP_FRAME_HEIGHT) or 0)
        self._cap = cap
        duration = frame_count / fps if fps > 0 else 0.0
        self.record = VideoRecord(
            video_id=self.path.stem,
            source_uri=str(self.path),
            duration_s=duration,
            fps=fps,
            width=width,
            height=height,
            readiness=READY,
        )

    def read_frame(self, frame_index: int) -> Optional[np.ndarray]:
        cv2 = self._cv2
        self._cap.set(cv2.CAP_PROP_POS_FRAMES, frame_index)
        ok, frame = self._cap.read()
        if not ok or frame is None:
            return None
        return cv2.cvtColor(frame, cv2.COLOR_BGR2RGB)

    def close(self) -> None:
        self._cap.release()


def open_source(uri: str | Path) -> FrameSource:
    """Open a frame source for either input form; raises on unreadable input."""
    path = Path(uri)
    if path.is_dir():
        return ManifestFrameSource(path)
    return VideoFileSource(path)


def probe_video(uri: str | Path) -> VideoRecord:
    """Readiness assessment: parse metadata, then require frame 0 to decode."""
    path = Path(uri)
    video_id = path.stem if path.suffix else path.name

    def unready(status: str) -> VideoRecord:
        return VideoRecord(
            video_id=video_id,
            source_uri=str(path),
            duration_s=0.0,
            fps=0.0,
            width=0,
            height=0,
            readiness=status,
        )

    if not path.exists():
        return unready(UNREADABLE)
    if path.is_dir():
        try:
            source: FrameSource = ManifestFrameSource(path)
        except (OSError, ValueError, KeyError):
            return unready(UNREADABLE)
    else:
        if path.stat().st_size == 0:
            return unready(UNREADABLE)
        try:
            source = VideoFileSource(path)
        except (OSError, ValueError):
            return unready(UNREADABLE)
    record = source.record
    if record.duration_s <= 0 or record.fps <= 0:
        record.readiness = UNREADABLE
        return record
    if source.read_frame(0) is None:
        record.readiness = NO_DECODABLE_FRAME
        return record
    record.readiness = READY
    return record


def make_windows(video: VideoRecord, window_length_s: float = DEFAULT_WINDOW_S) -> list[Window]:
    """Partition [0, D) into floor(D/L) contiguous windows; remainder dropped."""
    if video.readiness != READY:
        raise ValueError(f"video {video.video_id} is not READY ({video.readiness})")
    if window_length_s <= 0:
        raise ValueError("window length must be > 0")
    n = int(video.duration_s // window_length_s)
    return [
        Window(
            video_id=video.video_id,
            index=i,
            start_time_s=i * window_length_s,
            end_time_s=(i + 1) * window_length_s,
        )
        for i in range(n)
    ]


def sample_frames(window: Window, k: int, source: FrameSource) -> list[FrameRef]:
    """Sample K frames at targets start + j*L/K (endpoint excluded).

    Always returns K slots; failed decodes are flagged per slot rather than
    raised. The chosen source frame is the nearest decodable frame at or after
    the target that still lies inside the window.
    """
    if k < 1:
        raise ValueError("K must be >= 1")
    length = window.end_time_s - window.start_time_s
    refs = []
    for slot in range(k):
        target = window.start_time_s + slot * length / k
        frame_index = source.frame_at_or_after(target)
        frame = None
        while frame is None:
            ts = source.frame_timestamp(frame_index)
            if ts >= window.end_time_s - 1e-9:
                break
            frame = source.read_frame(frame_index)
            if frame is None:
                frame_index += 1
        if frame is None:
            refs.append(FrameRef(key=window.key, frame_slot=slot, timestamp_s=target, decode_ok=False))
        else:
            refs.append(
                FrameRef(
                    key=window.key,
                    frame_slot=slot,
                    timestamp_s=target,
                    decode_ok=True,
                    frame_index=frame_index,
                )
            )
    return refs


def load_frames(window: Window, k: int, source: FrameSource) -> tuple[list[FrameRef], list[np.ndarray]]:
    """sample_frames plus the decoded images for the slots that decoded."""
    refs = sample_frames(window, k, source)
    frames = []
    for ref in refs:
        if ref.decode_ok and ref.frame_index is not None:
            frame = source.read_frame(ref.frame_index)
            if frame is None:
                ref.decode_ok = False
                ref.frame_index = None
                continue
            frames.append(frame)
    return refs, frames


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def build_sampling_plan(
    windows: Sequence[Window],
    k_cov: int,
    k_rand: int,
    seed: int,
) -> SamplingPlan:
    """Select coverage + random window indices for labeling.

    Coverage indices are round-half-up(j*(N-1)/(k_cov-1)); the random quota is
    drawn without replacement from the remainder using xoshiro256** seeded from
    (seed, video_id), so identical inputs always give identical plans.
    """
    if k_cov < 0 or k_rand < 0:
        raise ValueError("k_cov and k_rand must be >= 0")
    for a, b in zip(windows, windows[1:]):
        if b.start_time_s < a.start_time_s:
            raise ValueError("windows must be ordered by start time")
    n = len(windows)
    video_id = windows[0].video_id if n else ""
    if n == 0:
        return SamplingPlan(video_id, seed, k_cov, k_rand, [], [])

    if k_cov == 0:
        coverage: list[int] = []
    elif k_cov == 1:
        coverage = [0]
    else:
        raw = (_round_half_up(j * (n - 1) / (k_cov - 1)) for j in range(k_cov))
        coverage = sorted({min(i, n - 1) for i in raw})

    remainder = [i for i in range(n) if i not in set(coverage)]
    rng = Xoshiro256StarStar(derive_stream_seed(seed, video_id))
    random_indices = sorted(rng.sample_without_replacement(remainder, min(k_rand, len(remainder))))
    return SamplingPlan(
        video_id=video_id,
        seed=seed,
        k_cov=k_cov,
        k_rand=k_rand,
        coverage_indices=coverage,
        random_indices=random_indices,
    )


def build_inventory(videos: Sequence[VideoRecord], window_length_s: float = DEFAULT_WINDOW_S) -> WindowInventory:
    inv = WindowInventory(window_length_s=window_length_s)
    for video in videos:
        if video.readiness != READY:
            continue
        inv.videos[video.video_id] = len(make_windows(video, window_length_s))
    return inv


def discover_corpus(root: str | Path) -> list[Path]:
    """List video sources under a corpus root (manifest dirs and video files)."""
    root = Path(root)
    out = []
    for child in sorted(root.iterdir()):
        if child.is_dir() and (child / "manifest.json").exists():
            out.append(child)
        elif child.is_file() and child.suffix.lower() in {".mp4", ".avi", ".mov", ".mkv"}:
            out.append(child)
    return out
