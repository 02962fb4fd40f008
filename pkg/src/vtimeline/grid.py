"""The evaluation run grid: context runs E1-E4, flow runs F1-F6, appearance
activity runs A1-A6, and their fusions AF1-AF6.

Every run shares one video-level split (same seed) so reports are comparable.
Feature tables are cached per layout string, so AF runs reuse the A and F
extractions they reference. Fusion stats are fitted on training rows only and
reapplied to test rows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .annotation import (
    ACTIVITY_LABELS,
    AXIS_ACTIVITY,
    AXIS_CONTEXT,
    CONTEXT_LABELS,
    LOW_EVIDENCE_LABEL,
    LabelStore,
)
from .corpus import FrameSource, Window, parse_window_key
from .evaluation import MetricsReport, evaluate, filter_clean, write_confusion_csvs
from .features.extract import FeatureSpec, FeatureTable, FusedSpec, extract_features
from .features.fusion import FusionStats, fit_fusion
from .models import ModelBundle, TrainConfig, save_model, train_softmax, video_level_split


@dataclass
class RunConfig:
    """One run id bound to its exact parameter bundle."""

    run_id: str
    task: str  # context | activity
    kind: str  # clip | clip_delta | flow | fused
    encoder_id: Optional[str] = None
    k: Optional[int] = None
    pooling: Optional[str] = None
    flow_preset: Optional[str] = None
    fuses: Optional[tuple[str, str]] = None  # (appearance run, flow run)

    @property
    def axis(self) -> str:
        return AXIS_CONTEXT if self.task == "context" else AXIS_ACTIVITY

    @property
    def label_space(self) -> tuple[str, ...]:
        return CONTEXT_LABELS if self.task == "context" else ACTIVITY_LABELS


def _clip_run(run_id, task, encoder_id, k, pooling, delta=False):
    return RunConfig(
        run_id=run_id,
        task=task,
        kind="clip_delta" if delta else "clip",
        encoder_id=encoder_id,
        k=k,
        pooling=pooling,
    )


EXPERIMENT_GRID: dict[str, RunConfig] = {
    # Context, pooled appearance embeddings.
    "E1": _clip_run("E1", "context", "ViT-B/32", 5, "mean"),
    "E2": _clip_run("E2", "context", "ViT-B/32", 10, "mean"),
    "E3": _clip_run("E3", "context", "ViT-L/14", 5, "mean"),
    "E4": _clip_run("E4", "context", "ViT-B/32", 10, "max"),
    # Activity, flow motion summaries.
    "F1": RunConfig("F1", "activity", "flow", k=5, flow_preset="F1"),
    "F2": RunConfig("F2", "activity", "flow", k=10, flow_preset="F2"),
    "F3": RunConfig("F3", "activity", "flow", k=10, flow_preset="F3"),
    "F4": RunConfig("F4", "activity", "flow", k=10, flow_preset="F4"),
    "F5": RunConfig("F5", "activity", "flow", k=10, flow_preset="F5"),
    "F6": RunConfig("F6", "activity", "flow", k=10, flow_preset="F6"),
    # Activity, appearance (with temporal deltas from A3 on).
    "A1": _clip_run("A1", "activity", "ViT-B/32", 10, "mean"),
    "A2": _clip_run("A2", "activity", "ViT-B/32", 10, "max"),
    "A3": _clip_run("A3", "activity", "ViT-B/32", 10, "mean", delta=True),
    "A4": _clip_run("A4", "activity", "ViT-B/32", 10, "max", delta=True),
    "A5": _clip_run("A5", "activity", "ViT-B/32", 5, "mean", delta=True),
    "A6": _clip_run("A6", "activity", "ViT-B/32", 20, "mean", delta=True),
    # Fused activity runs: AFi = z-scored fusion of Ai and Fi features.
    **{
        f"AF{i}": RunConfig(f"AF{i}", "activity", "fused", fuses=(f"A{i}", f"F{i}"))
        for i in range(1, 7)
    },
}


def run_feature_spec(config: RunConfig) -> FeatureSpec | FusedSpec:
    if config.kind == "fused":
        app_run, flow_run = config.fuses
        return FusedSpec(
            appearance=run_feature_spec(EXPERIMENT_GRID[app_run]),
            flow=run_feature_spec(EXPERIMENT_GRID[flow_run]),
        )
    if config.kind == "flow":
        return FeatureSpec(kind="flow", k=config.k, flow_preset=config.flow_preset)
    return FeatureSpec(
        kind=config.kind, k=config.k, pooling=config.pooling, encoder_id=config.encoder_id
    )


@dataclass
class GridRunResult:
    run_id: str
    report: MetricsReport
    bundle: ModelBundle
    model_path: Optional[Path] = None
    report_path: Optional[Path] = None


def _labeled_key_sets(
    store: LabelStore,
    split,
    pass_id: int,
    include_transitions: bool,
) -> tuple[list, list, int]:
    """(train annotations, clean test annotations, flagged-test count)."""
    train_rows = []
    test_rows = []
    for row in store.pass_rows(pass_id):
        try:
            video_id, _ = parse_window_key(row.key)
        except ValueError:
            continue
        if video_id in split.test_video_ids:
            test_rows.append(row)
        elif video_id in split.train_video_ids:
            train_rows.append(row)
    if not include_transitions:
        train_rows = filter_clean(train_rows)
    clean_test = filter_clean(test_rows)
    return train_rows, clean_test, len(test_rows) - len(clean_test)


def run_experiment_grid(
    run_ids: Sequence[str],
    sources: Mapping[str, FrameSource],
    windows: Sequence[Window],
    store: LabelStore,
    split_seed: int,
    test_fraction: float,
    encoders: Optional[Mapping[str, object]] = None,
    train_config: Optional[TrainConfig] = None,
    thresholds: Optional[Mapping[str, float]] = None,
    out_dir: Optional[str | Path] = None,
    pass_id: int = 1,
    include_transitions: bool = False,
) -> list[GridRunResult]:
    """Execute runs end to end: features, shared split, train, clean-test eval.

    When out_dir is given, each run persists its model and report under
    out_dir/<run_id>/.
    """
    train_config = train_config or TrainConfig()
    thresholds = dict(thresholds or {})
    tau = {"context": float(thresholds.get("tau_ctx", 0.0)), "activity": float(thresholds.get("tau_act", 0.0))}
    split = video_level_split(sorted(sources), test_fraction, split_seed)

    feature_cache: dict[str, FeatureTable] = {}

    def features_for(spec) -> FeatureTable:
        layout = spec.layout()
        if layout not in feature_cache:
            feature_cache[layout] = extract_features(sources, windows, spec, encoders)
        return feature_cache[layout]

    results = []
    for run_id in run_ids:
        if run_id not in EXPERIMENT_GRID:
            raise ValueError(f"unknown run id {run_id!r}")
        config = EXPERIMENT_GRID[run_id]
        spec = run_feature_spec(config)
        train_rows, test_rows, n_excluded = _labeled_key_sets(store, split, pass_id, include_transitions)

        fusion_stats: Optional[FusionStats] = None
        if isinstance(spec, FusedSpec):
            app_table = features_for(spec.appearance)
            flow_table = features_for(spec.flow)
            usable = set(app_table.keys) & set(flow_table.keys)
            train_rows = [r for r in train_rows if r.key in usable]
            test_rows = [r for r in test_rows if r.key in usable]
            train_keys = [r.key for r in train_rows]
            test_keys = [r.key for r in test_rows]
            X_train, fusion_stats = fit_fusion(
                app_table.select(train_keys), flow_table.select(train_keys)
            )
            X_test = (
                fusion_stats.transform(app_table.select(test_keys), flow_table.select(test_keys))
                if test_keys
                else np.zeros((0, X_train.shape[1]))
            )
        else:
            table = features_for(spec)
            usable = set(table.keys)
            train_rows = [r for r in train_rows if r.key in usable]
            test_rows = [r for r in test_rows if r.key in usable]
            X_train = table.select([r.key for r in train_rows])
            X_test = table.select([r.key for r in test_rows])

        axis = config.axis
        y_train = [r.label(axis) for r in train_rows]
        y_test = [r.label(axis) for r in test_rows]
        if not y_train:
            raise ValueError(f"run {run_id}: no training rows after filtering")
        if not y_test:
            raise ValueError(f"run {run_id}: no clean test rows")

        classifier = train_softmax(X_train, y_train, train_config, class_order=list(config.label_space))
        fallback = LOW_EVIDENCE_LABEL[axis]
        preds = classifier.predict(X_test)
        y_pred = [p.thresholded(tau[config.task], fallback) for p in preds]
        report = evaluate(
            y_test,
            y_pred,
            config.label_space,
            run_id=run_id,
            excluded_transition_windows=n_excluded,
        )
        report.extra.update(
            {
                "task": config.task,
                "representation": config.kind,
                "n_train": len(y_train),
                "split": split.to_dict(),
                "feature_layout": spec.layout(),
            }
        )

        bundle = ModelBundle(
            classifier=classifier,
            feature_spec=spec.to_dict(),
            feature_layout=spec.layout(),
            encoder_id=spec.encoder_id if config.kind != "flow" else None,
            fusion_stats=fusion_stats.to_dict() if fusion_stats else None,
        )
        result = GridRunResult(run_id=run_id, report=report, bundle=bundle)
        if out_dir is not None:
            run_dir = Path(out_dir) / run_id
            run_dir.mkdir(parents=True, exist_ok=True)
            result.model_path = run_dir / "model.json"
            save_model(
                result.model_path,
                classifier,
                feature_spec=bundle.feature_spec,
                feature_layout=bundle.feature_layout,
                encoder_id=bundle.encoder_id,
                fusion_stats=bundle.fusion_stats,
            )
            result.report_path = run_dir / "report.json"
            result.report_path.write_text(
                json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
            write_confusion_csvs(report, run_dir)
        results.append(result)
    return results
