"""Label vocabularies, window annotations, the label store, and agreement stats.

Both vocabularies are closed; LOW_VIS (context) and UNKNOWN (activity) are the
designated low-evidence values used instead of forced guesses. Annotations are
stored as plain strings so that imports of defective data stay representable
for the audit pass; validation is explicit, never implicit.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .corpus import WindowInventory, parse_window_key

CONTEXT_LABELS = ("PATROL_VEHICLE", "OUTDOOR", "INDOOR", "LOW_VIS")
ACTIVITY_LABELS = ("ROUTINE", "FOOT_PURSUIT", "HIGH_ACTIVITY", "UNKNOWN")

AXIS_CONTEXT = "context"
AXIS_ACTIVITY = "activity"
AXES = (AXIS_CONTEXT, AXIS_ACTIVITY)

LOW_EVIDENCE_LABEL = {AXIS_CONTEXT: "LOW_VIS", AXIS_ACTIVITY: "UNKNOWN"}

CSV_HEADER = [
    "key",
    "context",
    "activity",
    "context_transition",
    "activity_transition",
    "pass_id",
    "annotator_id",
    "created_at",
]


def vocabulary(axis: str) -> tuple[str, ...]:
    if axis == AXIS_CONTEXT:
        return CONTEXT_LABELS
    if axis == AXIS_ACTIVITY:
        return ACTIVITY_LABELS
    raise ValueError(f"unknown axis {axis!r}")


@dataclass
class WindowAnnotation:
    key: str
    context: str
    activity: str
    context_transition: bool
    activity_transition: bool
    pass_id: int
    annotator_id: str
    created_at: str

    def label(self, axis: str) -> str:
        return self.context if axis == AXIS_CONTEXT else self.activity

    def has_transition(self) -> bool:
        return self.context_transition or self.activity_transition

    def to_dict(self) -> dict:
        return asdict(self)


# One (label, duration_s) run inside a single window.
Segment = tuple[str, float]


def dominant_label(segments: Sequence[Segment], window_length_s: float = 10.0) -> str:
    """Label occupying the most time in the window; ties go to the label whose
    first segment starts earliest."""
    if not segments:
        raise ValueError("segment list is empty")
    elapsed = 0.0
    totals: dict[str, float] = {}
    first_start: dict[str, float] = {}
    for label, duration in segments:
        if duration <= 0:
            raise ValueError(f"non-positive segment duration for {label!r}")
        first_start.setdefault(label, elapsed)
        totals[label] = totals.get(label, 0.0) + duration
        elapsed += duration
    if abs(elapsed - window_length_s) > 1e-6:
        raise ValueError(f"segments sum to {elapsed}, expected {window_length_s}")
    return max(totals, key=lambda lab: (totals[lab], -first_start[lab]))


def validate_annotation(a: WindowAnnotation, inventory: Optional[WindowInventory] = None) -> list[dict]:
    """Structural validation; returns a list of error dicts (empty = ok)."""
    errors = []
    if a.context not in CONTEXT_LABELS:
        errors.append({"field": "context", "code": "oov", "message": f"unknown context label {a.context!r}"})
    if a.activity not in ACTIVITY_LABELS:
        errors.append({"field": "activity", "code": "oov", "message": f"unknown activity label {a.activity!r}"})
    for flag_name in ("context_transition", "activity_transition"):
        if not isinstance(getattr(a, flag_name), bool):
            errors.append({"field": flag_name, "code": "type", "message": f"{flag_name} must be a boolean"})
    if not isinstance(a.pass_id, int) or a.pass_id < 1:
        errors.append({"field": "pass_id", "code": "range", "message": "pass_id must be an integer >= 1"})
    try:
        parse_window_key(a.key)
    except ValueError:
        errors.append({"field": "key", "code": "malformed", "message": f"malformed window key {a.key!r}"})
        return errors
    if inventory is not None and not inventory.resolves(a.key):
        errors.append({"field": "key", "code": "dangling", "message": f"key {a.key} does not resolve to a window"})
    return errors


class AnnotationError(ValueError):
    def __init__(self, errors: list[dict]):
        super().__init__("; ".join(e["message"] for e in errors))
        self.errors = errors


class LabelStore:
    """Annotations keyed by (key, pass_id), with per-video ordered views.

    Writes go through :meth:`add` (validated, duplicate-rejecting) or the raw
    import paths used for auditing defective exports. Reads are cheap snapshots;
    callers needing cross-thread writes must serialize them (the HTTP service
    holds a single writer lock).
    """

    def __init__(self) -> None:
        self._rows: list[WindowAnnotation] = []
        self.revisions: dict[tuple[str, int], int] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def __iter__(self):
        return iter(self._rows)

    def add(self, a: WindowAnnotation, inventory: Optional[WindowInventory] = None) -> int:
        """Validated insert/replace; returns the new revision for (key, pass)."""
        errors = validate_annotation(a, inventory)
        if errors:
            raise AnnotationError(errors)
        slot = (a.key, a.pass_id)
        existing = self.get(a.key, a.pass_id)
        if existing is not None:
            self._rows[self._rows.index(existing)] = a
        else:
            self._rows.append(a)
        self.revisions[slot] = self.revisions.get(slot, 0) + 1
        return self.revisions[slot]

    def add_raw(self, a: WindowAnnotation) -> None:
        """Unvalidated append (import path); duplicates retained for audits."""
        self._rows.append(a)
        slot = (a.key, a.pass_id)
        self.revisions[slot] = self.revisions.get(slot, 0) + 1

    def get(self, key: str, pass_id: int) -> Optional[WindowAnnotation]:
        for row in self._rows:
            if row.key == key and row.pass_id == pass_id:
                return row
        return None

    def pass_ids(self) -> list[int]:
        return sorted({row.pass_id for row in self._rows})

    def pass_rows(self, pass_id: int) -> list[WindowAnnotation]:
        rows = [r for r in self._rows if r.pass_id == pass_id]
        return sorted(rows, key=_sort_key)

    def pass_map(self, pass_id: int) -> dict[str, WindowAnnotation]:
        return {r.key: r for r in self.pass_rows(pass_id)}

    def video_sequences(self, pass_id: int) -> dict[str, list[tuple[int, WindowAnnotation]]]:
        """Per-video (window index, annotation) lists sorted by index."""
        out: dict[str, list[tuple[int, WindowAnnotation]]] = {}
        for row in self.pass_rows(pass_id):
            try:
                video_id, index = parse_window_key(row.key)
            except ValueError:
                continue
            out.setdefault(video_id, []).append((index, row))
        for seq in out.values():
            seq.sort(key=lambda item: item[0])
        return out

    def canonical_rows(self) -> list[WindowAnnotation]:
        return sorted(self._rows, key=_sort_key)


def _sort_key(a: WindowAnnotation) -> tuple:
    try:
        video_id, index = parse_window_key(a.key)
    except ValueError:
        video_id, index = a.key, -1
    return (video_id, index, a.pass_id, a.annotator_id)


def export_csv(store: LabelStore, path: str | Path) -> None:
    """Canonical CSV export: fixed header, UTF-8, LF endings, flags as 0/1."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for a in store.canonical_rows():
            writer.writerow(
                [
                    a.key,
                    a.context,
                    a.activity,
                    int(a.context_transition),
                    int(a.activity_transition),
                    a.pass_id,
                    a.annotator_id,
                    a.created_at,
                ]
            )


def import_csv(path: str | Path) -> LabelStore:
    """Raw import; no validation so defective exports remain auditable."""
    store = LabelStore()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in CSV_HEADER if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"label CSV missing columns: {missing}")
        for row in reader:
            store.add_raw(
                WindowAnnotation(
                    key=row["key"],
                    context=row["context"],
                    activity=row["activity"],
                    context_transition=row["context_transition"] == "1",
                    activity_transition=row["activity_transition"] == "1",
                    pass_id=int(row["pass_id"]),
                    annotator_id=row["annotator_id"],
                    created_at=row["created_at"],
                )
            )
    return store


def export_jsonl(store: LabelStore, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a in store.canonical_rows():
            fh.write(json.dumps(a.to_dict(), sort_keys=True) + "\n")


def import_jsonl(path: str | Path) -> LabelStore:
    store = LabelStore()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        store.add_raw(
            WindowAnnotation(
                key=obj["key"],
                context=obj["context"],
                activity=obj["activity"],
                context_transition=bool(obj["context_transition"]),
                activity_transition=bool(obj["activity_transition"]),
                pass_id=int(obj["pass_id"]),
                annotator_id=obj["annotator_id"],
                created_at=obj["created_at"],
            )
        )
    return store


# ---------------------------------------------------------------------------
# Inter-annotator agreement


def _paired_labels(
    pass1: Mapping[str, WindowAnnotation],
    pass2: Mapping[str, WindowAnnotation],
    axis: str,
) -> list[tuple[str, str]]:
    if set(pass1) != set(pass2):
        only1 = sorted(set(pass1) - set(pass2))[:3]
        only2 = sorted(set(pass2) - set(pass1))[:3]
        raise ValueError(f"pass key sets differ (e.g. {only1} vs {only2})")
    if not pass1:
        raise ValueError("empty pass")
    keys = sorted(pass1)
    return [(pass1[k].label(axis), pass2[k].label(axis)) for k in keys]


def exact_agreement(
    pass1: Mapping[str, WindowAnnotation],
    pass2: Mapping[str, WindowAnnotation],
    axis: str,
) -> float:
    """Fraction of windows where the two passes chose the same label."""
    pairs = _paired_labels(pass1, pass2, axis)
    return sum(1 for a, b in pairs if a == b) / len(pairs)


def cohens_kappa(
    pass1: Mapping[str, WindowAnnotation],
    pass2: Mapping[str, WindowAnnotation],
    axis: str,
) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e).

    p_e is the dot product of the two passes' own marginal label
    distributions. The degenerate p_e = 1 case (both passes constant) returns
    1.0 when observed agreement is perfect and is an error otherwise.
    """
    pairs = _paired_labels(pass1, pass2, axis)
    n = len(pairs)
    p_o = sum(1 for a, b in pairs if a == b) / n
    labels = sorted({a for a, _ in pairs} | {b for _, b in pairs})
    m1 = {lab: sum(1 for a, _ in pairs if a == lab) / n for lab in labels}
    m2 = {lab: sum(1 for _, b in pairs if b == lab) / n for lab in labels}
    p_e = sum(m1[lab] * m2[lab] for lab in labels)
    if abs(1.0 - p_e) < 1e-12:
        if p_o == 1.0:
            return 1.0
        raise ValueError("kappa undefined: p_e = 1 with imperfect agreement")
    return (p_o - p_e) / (1.0 - p_e)


def agreement_matrix(
    pass1: Mapping[str, WindowAnnotation],
    pass2: Mapping[str, WindowAnnotation],
    axis: str,
    row_normalize: bool = False,
) -> np.ndarray:
    """V x V counts of (pass1 label, pass2 label) in fixed vocabulary order.

    Rows keep the full vocabulary shape; with normalization, nonzero rows sum
    to 1 and empty rows stay all-zero.
    """
    vocab = vocabulary(axis)
    index = {lab: i for i, lab in enumerate(vocab)}
    matrix = np.zeros((len(vocab), len(vocab)), dtype=np.float64)
    for a, b in _paired_labels(pass1, pass2, axis):
        if a not in index or b not in index:
            raise ValueError(f"label outside vocabulary: {a!r}/{b!r}")
        matrix[index[a], index[b]] += 1.0
    if row_normalize:
        sums = matrix.sum(axis=1, keepdims=True)
        nonzero = sums[:, 0] > 0
        matrix[nonzero] /= sums[nonzero]
    return matrix
