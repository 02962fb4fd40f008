"""Window-level evaluation: accuracy, macro-F1, confusion matrices, and
recurring confusions across runs.

Macro-F1 averages over the full declared label space; classes never predicted
and never correct contribute an F1 of 0 (which is exactly why high accuracy
and low macro-F1 coexist on imbalanced activity data).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .annotation import LabelStore, WindowAnnotation


def filter_clean(annotations: Sequence[WindowAnnotation]) -> list[WindowAnnotation]:
    """Drop windows whose annotation has either transition flag set."""
    return [a for a in annotations if not a.has_transition()]


def confusion_matrix(
    y_true: Sequence[str],
    y_pred: Sequence[str],
    label_space: Sequence[str],
    normalize: bool = False,
) -> np.ndarray:
    """(true, predicted) counts over the fixed label space; zero rows kept."""
    if len(y_true) != len(y_pred):
        raise ValueError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted")
    index = {lab: i for i, lab in enumerate(label_space)}
    matrix = np.zeros((len(label_space), len(label_space)), dtype=np.float64)
    for t, p in zip(y_true, y_pred):
        if t not in index or p not in index:
            raise ValueError(f"label outside declared space: {t!r}/{p!r}")
        matrix[index[t], index[p]] += 1.0
    if normalize:
        sums = matrix.sum(axis=1, keepdims=True)
        nonzero = sums[:, 0] > 0
        matrix[nonzero] /= sums[nonzero]
    return matrix


@dataclass
class MetricsReport:
    accuracy: float
    macro_f1: float
    per_class: dict[str, dict]
    confusion_raw: list[list[int]]
    confusion_normalized: list[list[float]]
    label_space: list[str]
    n_test: int
    excluded_transition_windows: int = 0
    run_id: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "run_id": self.run_id,
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "per_class": self.per_class,
            "confusion_raw": self.confusion_raw,
            "confusion_normalized": self.confusion_normalized,
            "label_space": self.label_space,
            "n_test": self.n_test,
            "excluded_transition_windows": self.excluded_transition_windows,
        }
        out.update(self.extra)
        return out


def evaluate(
    y_true: Sequence[str],
    y_pred: Sequence[str],
    label_space: Sequence[str],
    run_id: Optional[str] = None,
    excluded_transition_windows: int = 0,
) -> MetricsReport:
    """Accuracy plus per-class precision/recall/F1 over the label space.

    Undefined precision or recall (empty denominator) counts as 0, so a class
    absent from both truth and predictions contributes F1 = 0 to the macro
    mean.
    """
    if len(y_true) == 0:
        raise ValueError("nothing to evaluate")
    raw = confusion_matrix(y_true, y_pred, label_space)
    normalized = confusion_matrix(y_true, y_pred, label_space, normalize=True)
    accuracy = float(np.trace(raw) / raw.sum())
    per_class = {}
    f1s = []
    for i, label in enumerate(label_space):
        tp = raw[i, i]
        fp = raw[:, i].sum() - tp
        fn = raw[i, :].sum() - tp
        precision = float(tp / (tp + fp)) if tp + fp > 0 else 0.0
        recall = float(tp / (tp + fn)) if tp + fn > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class[label] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": int(raw[i, :].sum()),
        }
        f1s.append(f1)
    return MetricsReport(
        accuracy=accuracy,
        macro_f1=float(np.mean(f1s)),
        per_class=per_class,
        confusion_raw=[[int(v) for v in row] for row in raw],
        confusion_normalized=[[float(v) for v in row] for row in normalized],
        label_space=list(label_space),
        n_test=len(y_true),
        excluded_transition_windows=excluded_transition_windows,
        run_id=run_id,
    )


def clean_eval_pairs(
    store: LabelStore,
    predictions: dict[str, str],
    axis: str,
    pass_id: int = 1,
    keys: Optional[Sequence[str]] = None,
) -> tuple[list[str], list[str], int]:
    """Align ground truth with predictions over clean (non-transition) windows.

    Returns (y_true, y_pred, n_excluded_by_flags) over the intersection of
    labeled keys, predicted keys, and the optional key restriction.
    """
    rows = store.pass_rows(pass_id)
    if keys is not None:
        allowed = set(keys)
        rows = [r for r in rows if r.key in allowed]
    rows = [r for r in rows if r.key in predictions]
    clean = filter_clean(rows)
    excluded = len(rows) - len(clean)
    y_true = [r.label(axis) for r in clean]
    y_pred = [predictions[r.key] for r in clean]
    return y_true, y_pred, excluded


def recurring_confusions(reports: Sequence[MetricsReport]) -> list[dict]:
    """Aggregate off-diagonal confusion counts per ordered (true, pred) pair
    across runs, ranked by total."""
    if not reports:
        raise ValueError("no reports to aggregate")
    space = reports[0].label_space
    for rep in reports[1:]:
        if rep.label_space != space:
            raise ValueError("reports use different label spaces")
    totals: dict[tuple[str, str], dict] = {}
    for rep in reports:
        run = rep.run_id or "run"
        raw = rep.confusion_raw
        for i, true_label in enumerate(space):
            for j, pred_label in enumerate(space):
                if i == j or raw[i][j] == 0:
                    continue
                entry = totals.setdefault(
                    (true_label, pred_label),
                    {"true": true_label, "pred": pred_label, "total": 0, "per_run": {}},
                )
                entry["total"] += raw[i][j]
                entry["per_run"][run] = entry["per_run"].get(run, 0) + raw[i][j]
    ranked = sorted(totals.values(), key=lambda e: (-e["total"], e["true"], e["pred"]))
    return ranked


def write_confusion_csvs(report: MetricsReport, outdir: str | Path, prefix: str = "confusion") -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for suffix, matrix, fmt in (
        ("raw", report.confusion_raw, "{:d}"),
        ("normalized", report.confusion_normalized, "{:.4f}"),
    ):
        path = outdir / f"{prefix}_{suffix}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["true\\pred"] + report.label_space)
            for label, row in zip(report.label_space, matrix):
                writer.writerow([label] + [fmt.format(v) for v in row])
        written.append(path)
    return written
