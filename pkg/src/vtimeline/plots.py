"""Report figures rendered to files next to the CSV/JSON artifacts.

Everything uses the Agg backend; each function writes one PNG and returns its
path. Keep these quick and legible rather than pretty: they are audit aids.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .audits import AuditReport, TransitionStats

_DPI = 120


def _finish(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def save_label_distribution(distributions: dict, path: str | Path) -> Path:
    """Side-by-side bars of per-axis label counts (with percents on top)."""
    axes_names = list(distributions)
    fig, axs = plt.subplots(1, len(axes_names), figsize=(5.5 * len(axes_names), 3.6))
    if len(axes_names) == 1:
        axs = [axs]
    for ax, axis_name in zip(axs, axes_names):
        dist = distributions[axis_name]
        labels = sorted(dist, key=lambda lab: -dist[lab]["count"])
        counts = [dist[lab]["count"] for lab in labels]
        bars = ax.bar(labels, counts, color="#3b6ea5")
        for bar, lab in zip(bars, labels):
            ax.annotate(
                f"{dist[lab]['percent']:.2f}%",
                (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                ha="center",
                va="bottom",
                fontsize=8,
            )
        ax.set_title(f"{axis_name} label distribution")
        ax.set_ylabel("windows")
        ax.tick_params(axis="x", rotation=20)
    return _finish(fig, path)


def save_transition_counts(stats: TransitionStats, path: str | Path, top_n: int = 10) -> Path:
    """Most frequent adjacent-window transitions for one axis."""
    pairs = sorted(stats.pair_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
    fig, ax = plt.subplots(figsize=(6.5, 3.2 + 0.2 * len(pairs)))
    names = [p for p, _ in pairs][::-1]
    values = [c for _, c in pairs][::-1]
    ax.barh(names, values, color="#b0623a")
    ax.set_title(f"{stats.axis} transitions between adjacent labeled windows (rate {stats.rate:.4f})")
    ax.set_xlabel("count")
    return _finish(fig, path)


def save_matrix_heatmap(
    matrix: np.ndarray | Sequence[Sequence[float]],
    labels: Sequence[str],
    path: str | Path,
    title: str,
    xlabel: str = "pass 2",
    ylabel: str = "pass 1",
    normalized: bool = False,
) -> Path:
    """Annotated heatmap for agreement and confusion matrices."""
    matrix = np.asarray(matrix, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(4.8, 4.2))
    im = ax.imshow(matrix, cmap="Blues", vmin=0.0, vmax=1.0 if normalized else None)
    ax.set_xticks(range(len(labels)), labels, rotation=30, ha="right", fontsize=8)
    ax.set_yticks(range(len(labels)), labels, fontsize=8)
    threshold = (matrix.max() if matrix.size else 0) * 0.6
    for i in range(matrix.shape[0]):
        for j in range(matrix.shape[1]):
            value = matrix[i, j]
            text = f"{value:.2f}" if normalized else f"{int(round(value))}"
            ax.text(
                j,
                i,
                text,
                ha="center",
                va="center",
                fontsize=8,
                color="white" if value > threshold else "black",
            )
    ax.set_title(title, fontsize=10)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.colorbar(im, ax=ax, fraction=0.046)
    return _finish(fig, path)


def save_recurring_confusions(ranked: list[dict], path: str | Path, title: str, top_n: int = 10) -> Path:
    """Stacked per-run bars for the most frequent (true -> predicted) pairs."""
    ranked = ranked[:top_n]
    fig, ax = plt.subplots(figsize=(7.0, 3.2 + 0.25 * len(ranked)))
    names = [f"{e['true']} → {e['pred']}" for e in ranked][::-1]
    runs = sorted({run for e in ranked for run in e["per_run"]})
    bottoms = np.zeros(len(ranked))
    cmap = plt.get_cmap("tab10")
    for ri, run in enumerate(runs):
        values = np.array([e["per_run"].get(run, 0) for e in ranked])[::-1]
        ax.barh(names, values, left=bottoms, label=run, color=cmap(ri % 10))
        bottoms += values
    ax.set_title(title, fontsize=10)
    ax.set_xlabel("count across runs")
    if runs:
        ax.legend(fontsize=7, ncols=min(len(runs), 6))
    return _finish(fig, path)


def save_audit_figures(report: AuditReport, outdir: str | Path) -> list[Path]:
    """The audit report's figure set: distributions + per-axis transitions."""
    outdir = Path(outdir)
    written = [save_label_distribution(report.distributions, outdir / "label_distribution.png")]
    for axis, stats in report.transitions.items():
        written.append(save_transition_counts(stats, outdir / f"transitions_{axis}.png"))
    return written
