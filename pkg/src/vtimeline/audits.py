"""Dataset audits: integrity, distributions, conditional rates, transitions,
run lengths, and within-window transition burden.

All functions are pure over a store snapshot and default to auditing pass 1
(the second pass, when present, exists for agreement only). Percentages are
rounded half-up at the precision the report tables use; rates and conditional
matrices stay unrounded so the row-sum invariants hold exactly, with rounding
deferred to the CSV writers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path
from typing import Optional

from .annotation import (
    ACTIVITY_LABELS,
    AXES,
    CONTEXT_LABELS,
    LabelStore,
    vocabulary,
)
from .corpus import WindowInventory

# Display order used by the report tables (descending prevalence for activity
# columns; context rows alphabetical-by-table convention).
TABLE_ACTIVITY_ORDER = ("ROUTINE", "HIGH_ACTIVITY", "FOOT_PURSUIT", "UNKNOWN")
TABLE_CONTEXT_ORDER = ("INDOOR", "OUTDOOR", "PATROL_VEHICLE", "LOW_VIS")

ADJACENCY_RULE = "consecutive-window-indices"


def round_half_up(value: Decimal | float, ndigits: int) -> float:
    quantum = Decimal(1).scaleb(-ndigits)
    return float(Decimal(str(value) if isinstance(value, float) else value).quantize(quantum, rounding=ROUND_HALF_UP))


def _ratio_half_up(num: int, den: int, ndigits: int, scale: int = 1) -> float:
    quantum = Decimal(1).scaleb(-ndigits)
    return float((Decimal(num * scale) / Decimal(den)).quantize(quantum, rounding=ROUND_HALF_UP))


@dataclass
class IntegrityReport:
    total: int
    unique_keys: int
    duplicates: int
    missing_labels: int
    oov: int
    dangling: int
    passed: bool

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def integrity_check(store: LabelStore, inventory: WindowInventory, pass_id: int = 1) -> IntegrityReport:
    """Count structural defects; passes iff every defect count is zero."""
    rows = store.pass_rows(pass_id)
    keys = [r.key for r in rows]
    unique = len(set(keys))
    duplicates = len(keys) - unique
    missing = sum(1 for r in rows if not r.context or not r.activity)
    oov = sum(1 for r in rows if r.context and r.context not in CONTEXT_LABELS)
    oov += sum(1 for r in rows if r.activity and r.activity not in ACTIVITY_LABELS)
    dangling = sum(1 for r in rows if not inventory.resolves(r.key))
    return IntegrityReport(
        total=len(rows),
        unique_keys=unique,
        duplicates=duplicates,
        missing_labels=missing,
        oov=oov,
        dangling=dangling,
        passed=(duplicates == 0 and missing == 0 and oov == 0 and dangling == 0),
    )


def label_distribution(store: LabelStore, axis: str, pass_id: int = 1) -> dict[str, dict]:
    """Per-label counts and half-up 2-decimal percents; zero labels retained."""
    rows = store.pass_rows(pass_id)
    if not rows:
        raise ValueError("label distribution of an empty store")
    vocab = vocabulary(axis)
    counts = {lab: 0 for lab in vocab}
    for r in rows:
        lab = r.label(axis)
        if lab in counts:
            counts[lab] += 1
    total = len(rows)
    return {
        lab: {"count": counts[lab], "percent": _ratio_half_up(counts[lab], total, 2, scale=100)}
        for lab in vocab
    }


def conditional_rates(store: LabelStore, pass_id: int = 1) -> dict[str, dict[str, float]]:
    """P(activity | context). Rows for contexts with zero windows are all-zero."""
    rows = store.pass_rows(pass_id)
    if not rows:
        raise ValueError("conditional rates of an empty store")
    table = {c: {a: 0 for a in ACTIVITY_LABELS} for c in CONTEXT_LABELS}
    totals = {c: 0 for c in CONTEXT_LABELS}
    for r in rows:
        if r.context in table and r.activity in ACTIVITY_LABELS:
            table[r.context][r.activity] += 1
            totals[r.context] += 1
    out: dict[str, dict[str, float]] = {}
    for c in CONTEXT_LABELS:
        if totals[c] == 0:
            out[c] = {a: 0.0 for a in ACTIVITY_LABELS}
        else:
            out[c] = {a: table[c][a] / totals[c] for a in ACTIVITY_LABELS}
    return out


@dataclass
class TransitionStats:
    axis: str
    n_pairs: int
    n_changed: int
    rate: float
    pair_counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "n_pairs": self.n_pairs,
            "n_changed": self.n_changed,
            "rate": self.rate,
            "pair_counts": dict(sorted(self.pair_counts.items())),
        }


def _adjacent_pairs(store: LabelStore, axis: str, pass_id: int) -> list[tuple[str, str]]:
    pairs = []
    for _, seq in sorted(store.video_sequences(pass_id).items()):
        for (i, a), (j, b) in zip(seq, seq[1:]):
            if j == i + 1:
                pairs.append((a.label(axis), b.label(axis)))
    return pairs


def adjacent_transition_stats(store: LabelStore, axis: str, pass_id: int = 1) -> TransitionStats:
    """Label change rate over pairs of consecutive window indices per video.

    A labeling gap breaks adjacency; ordered pair counts include
    self-transitions. Videos with fewer than two labeled windows contribute
    nothing.
    """
    pairs = _adjacent_pairs(store, axis, pass_id)
    counts: dict[str, int] = {}
    changed = 0
    for a, b in pairs:
        counts[f"{a}->{b}"] = counts.get(f"{a}->{b}", 0) + 1
        if a != b:
            changed += 1
    rate = changed / len(pairs) if pairs else 0.0
    return TransitionStats(axis=axis, n_pairs=len(pairs), n_changed=changed, rate=rate, pair_counts=counts)


def run_lengths(store: LabelStore, axis: str, pass_id: int = 1) -> dict[str, dict]:
    """Per-label maximal-run stats; median is the lower median for even counts."""
    runs: dict[str, list[int]] = {}
    for _, seq in sorted(store.video_sequences(pass_id).items()):
        current_label = None
        current_len = 0
        prev_index = None
        for index, a in seq:
            lab = a.label(axis)
            if lab == current_label and prev_index is not None and index == prev_index + 1:
                current_len += 1
            else:
                if current_label is not None:
                    runs.setdefault(current_label, []).append(current_len)
                current_label = lab
                current_len = 1
            prev_index = index
        if current_label is not None:
            runs.setdefault(current_label, []).append(current_len)
    out = {}
    for label, lengths in sorted(runs.items()):
        ordered = sorted(lengths)
        median = ordered[(len(ordered) - 1) // 2]
        mean = _ratio_half_up(sum(ordered), len(ordered), 2)
        out[label] = {"count": len(ordered), "median": median, "mean": mean}
    return out


@dataclass
class BurdenReport:
    total: int
    activity_only: int
    context_only: int
    both: int
    pct_of_store: Optional[float]
    pct_activity_only: Optional[float]
    pct_context_only: Optional[float]
    pct_both: Optional[float]

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def within_window_burden(store: LabelStore, pass_id: int = 1) -> BurdenReport:
    """Classify flagged windows by which transition flags are set.

    The headline percent is of the whole labeled set; the three shares are of
    the flagged subset (null when nothing is flagged).
    """
    rows = store.pass_rows(pass_id)
    flagged = [r for r in rows if r.has_transition()]
    activity_only = sum(1 for r in flagged if r.activity_transition and not r.context_transition)
    context_only = sum(1 for r in flagged if r.context_transition and not r.activity_transition)
    both = sum(1 for r in flagged if r.context_transition and r.activity_transition)
    total = len(flagged)
    return BurdenReport(
        total=total,
        activity_only=activity_only,
        context_only=context_only,
        both=both,
        pct_of_store=_ratio_half_up(total, len(rows), 1, scale=100) if rows else None,
        pct_activity_only=_ratio_half_up(activity_only, total, 1, scale=100) if total else None,
        pct_context_only=_ratio_half_up(context_only, total, 1, scale=100) if total else None,
        pct_both=_ratio_half_up(both, total, 1, scale=100) if total else None,
    )


@dataclass
class AuditReport:
    integrity: IntegrityReport
    distributions: dict
    conditional: dict
    transitions: dict
    run_lengths: dict
    burden: BurdenReport
    pass_id: int
    adjacency_rule: str = ADJACENCY_RULE

    def to_dict(self) -> dict:
        return {
            "pass_id": self.pass_id,
            "adjacency_rule": self.adjacency_rule,
            "integrity": self.integrity.to_dict(),
            "distributions": self.distributions,
            "conditional": self.conditional,
            "transitions": {axis: stats.to_dict() for axis, stats in self.transitions.items()},
            "run_lengths": self.run_lengths,
            "burden": self.burden.to_dict(),
        }


def build_audit_report(store: LabelStore, inventory: WindowInventory, pass_id: int = 1) -> AuditReport:
    return AuditReport(
        integrity=integrity_check(store, inventory, pass_id),
        distributions={axis: label_distribution(store, axis, pass_id) for axis in AXES},
        conditional=conditional_rates(store, pass_id),
        transitions={axis: adjacent_transition_stats(store, axis, pass_id) for axis in AXES},
        run_lengths={axis: run_lengths(store, axis, pass_id) for axis in AXES},
        burden=within_window_burden(store, pass_id),
        pass_id=pass_id,
    )


def write_audit_csvs(report: AuditReport, outdir: str | Path) -> list[Path]:
    """Write the three report tables (distribution, conditional, transitions)
    in their display column order; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    path = outdir / "label_distribution.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["axis", "label", "count", "percent"])
        for axis in AXES:
            dist = report.distributions[axis]
            for label in sorted(dist, key=lambda lab: -dist[lab]["count"]):
                writer.writerow([axis, label, dist[label]["count"], f"{dist[label]['percent']:.2f}"])
    written.append(path)

    path = outdir / "conditional_rates.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["context"] + list(TABLE_ACTIVITY_ORDER))
        for context in TABLE_CONTEXT_ORDER:
            row = report.conditional[context]
            writer.writerow([context] + [f"{round_half_up(row[a], 3):.3f}" for a in TABLE_ACTIVITY_ORDER])
    written.append(path)

    path = outdir / "transitions.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["axis", "pair", "count"])
        for axis in AXES:
            counts = report.transitions[axis].pair_counts
            for pair in sorted(counts, key=lambda p: (-counts[p], p)):
                writer.writerow([axis, pair, counts[pair]])
    written.append(path)
    return written
