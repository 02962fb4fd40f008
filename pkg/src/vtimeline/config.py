"""Project and grid configuration files (strict JSON: unknown keys rejected).

Relative paths resolve against the config file's directory. Input paths must
exist at load; output directories are created so later stages can rely on
them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


class ConfigError(ValueError):
    pass


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {unknown}")


def _resolve(base: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else base / path


@dataclass
class StoragePaths:
    labels_path: Path
    reports_dir: Path
    timelines_dir: Path
    models_dir: Path
    features_dir: Path


@dataclass
class ProjectConfig:
    corpus_root: Path
    window_length_s: float
    frames_per_window: int
    pooling: str
    encoders: dict[str, dict]
    tau_ctx: float
    tau_act: float
    plan_seed: int
    split_seed: int
    k_cov: int
    k_rand: int
    test_fraction: float
    storage: StoragePaths
    auth_token: Optional[str] = None


_TOP_KEYS = {
    "corpus_root",
    "window_length_s",
    "frames_per_window",
    "pooling",
    "encoders",
    "thresholds",
    "seeds",
    "plan",
    "test_fraction",
    "storage",
    "auth_token",
}
_STORAGE_KEYS = {"labels_path", "reports_dir", "timelines_dir", "models_dir", "features_dir"}
_THRESHOLD_KEYS = {"tau_ctx", "tau_act"}
_SEED_KEYS = {"plan", "split"}
_PLAN_KEYS = {"k_cov", "k_rand"}
_ENCODER_KEYS = {"kind", "dim", "path", "url"}


def load_project_config(path: str | Path) -> ProjectConfig:
    path = Path(path)
    base = path.parent
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    _check_keys(obj, _TOP_KEYS, str(path))

    thresholds = obj.get("thresholds", {})
    _check_keys(thresholds, _THRESHOLD_KEYS, "thresholds")
    seeds = obj.get("seeds", {})
    _check_keys(seeds, _SEED_KEYS, "seeds")
    plan = obj.get("plan", {})
    _check_keys(plan, _PLAN_KEYS, "plan")
    storage_obj = obj.get("storage", {})
    _check_keys(storage_obj, _STORAGE_KEYS, "storage")
    encoders = obj.get("encoders", {})
    for encoder_id, spec in encoders.items():
        if not isinstance(spec, dict):
            raise ConfigError(f"encoder {encoder_id!r} spec must be an object")
        _check_keys(spec, _ENCODER_KEYS, f"encoders.{encoder_id}")

    corpus_root = _resolve(base, obj.get("corpus_root", "corpus"))
    if not corpus_root.exists():
        raise ConfigError(f"corpus_root does not exist: {corpus_root}")

    storage = StoragePaths(
        labels_path=_resolve(base, storage_obj.get("labels_path", "labels.jsonl")),
        reports_dir=_resolve(base, storage_obj.get("reports_dir", "reports")),
        timelines_dir=_resolve(base, storage_obj.get("timelines_dir", "timelines")),
        models_dir=_resolve(base, storage_obj.get("models_dir", "models")),
        features_dir=_resolve(base, storage_obj.get("features_dir", "features")),
    )
    for directory in (storage.reports_dir, storage.timelines_dir, storage.models_dir, storage.features_dir):
        directory.mkdir(parents=True, exist_ok=True)
    storage.labels_path.parent.mkdir(parents=True, exist_ok=True)

    window_length_s = float(obj.get("window_length_s", 10.0))
    if window_length_s <= 0:
        raise ConfigError("window_length_s must be > 0")

    return ProjectConfig(
        corpus_root=corpus_root,
        window_length_s=window_length_s,
        frames_per_window=int(obj.get("frames_per_window", 10)),
        pooling=obj.get("pooling", "mean"),
        encoders=encoders,
        tau_ctx=float(thresholds.get("tau_ctx", 0.0)),
        tau_act=float(thresholds.get("tau_act", 0.0)),
        plan_seed=int(seeds.get("plan", 0)),
        split_seed=int(seeds.get("split", 0)),
        k_cov=int(plan.get("k_cov", 4)),
        k_rand=int(plan.get("k_rand", 2)),
        test_fraction=float(obj.get("test_fraction", 0.25)),
        storage=storage,
        auth_token=obj.get("auth_token"),
    )


@dataclass
class GridConfig:
    corpus_root: Path
    labels_path: Path
    out_dir: Path
    runs: list[str]
    split_seed: int
    test_fraction: float
    encoders: dict[str, dict]
    window_length_s: float = 10.0
    train: dict = field(default_factory=dict)
    tau_ctx: float = 0.0
    tau_act: float = 0.0
    include_transitions: bool = False


_GRID_KEYS = {
    "corpus_root",
    "labels_path",
    "out_dir",
    "runs",
    "split_seed",
    "test_fraction",
    "encoders",
    "window_length_s",
    "train",
    "thresholds",
    "include_transitions",
}
_TRAIN_KEYS = {"l2_lambda", "max_iters", "grad_tolerance", "seed", "balance"}


def load_grid_config(path: str | Path) -> GridConfig:
    path = Path(path)
    base = path.parent
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read grid config {path}: {exc}") from exc
    _check_keys(obj, _GRID_KEYS, str(path))
    thresholds = obj.get("thresholds", {})
    _check_keys(thresholds, _THRESHOLD_KEYS, "thresholds")
    train = obj.get("train", {})
    _check_keys(train, _TRAIN_KEYS, "train")
    encoders = obj.get("encoders", {})
    for encoder_id, spec in encoders.items():
        _check_keys(spec, _ENCODER_KEYS, f"encoders.{encoder_id}")

    corpus_root = _resolve(base, obj["corpus_root"])
    labels_path = _resolve(base, obj["labels_path"])
    for required in (corpus_root, labels_path):
        if not required.exists():
            raise ConfigError(f"path does not exist: {required}")
    runs = list(obj.get("runs", []))
    if not runs:
        runs = []
    return GridConfig(
        corpus_root=corpus_root,
        labels_path=labels_path,
        out_dir=_resolve(base, obj.get("out_dir", "grid_out")),
        runs=runs,
        split_seed=int(obj.get("split_seed", 0)),
        test_fraction=float(obj.get("test_fraction", 0.25)),
        encoders=encoders,
        window_length_s=float(obj.get("window_length_s", 10.0)),
        train=train,
        tau_ctx=float(thresholds.get("tau_ctx", 0.0)),
        tau_act=float(thresholds.get("tau_act", 0.0)),
        include_transitions=bool(obj.get("include_transitions", False)),
    )
