import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vtimeline.annotation import (
    ACTIVITY_LABELS,
    CONTEXT_LABELS,
    AnnotationError,
    LabelStore,
    agreement_matrix,
    cohens_kappa,
    dominant_label,
    exact_agreement,
    export_csv,
    export_jsonl,
    import_csv,
    import_jsonl,
    validate_annotation,
    vocabulary,
)
from vtimeline.corpus import WindowInventory

from conftest import annotation_for


# -- dominant-time rule -------------------------------------------------------


def test_dominant_label_strict_majority():
    assert dominant_label([("OUTDOOR", 7.0), ("INDOOR", 3.0)]) == "OUTDOOR"


def test_dominant_label_tie_goes_to_earliest():
    assert dominant_label([("INDOOR", 5.0), ("OUTDOOR", 5.0)]) == "INDOOR"


def test_dominant_label_single_segment():
    assert dominant_label([("LOW_VIS", 10.0)]) == "LOW_VIS"


def test_dominant_label_rejects_bad_input():
    with pytest.raises(ValueError):
        dominant_label([])
    with pytest.raises(ValueError):
        dominant_label([("OUTDOOR", -1.0), ("INDOOR", 11.0)])
    with pytest.raises(ValueError):
        dominant_label([("OUTDOOR", 3.0)])  # does not sum to L


@given(st.lists(st.sampled_from(["A", "B", "C"]), min_size=1, max_size=8))
def test_dominant_label_merging_same_label_segments_is_invariant(labels):
    # Each segment gets equal time; merging adjacent same-label segments
    # (summing durations) must not change the dominant label.
    dur = 10.0 / len(labels)
    segments = [(lab, dur) for lab in labels]
    merged = []
    for lab, d in segments:
        if merged and merged[-1][0] == lab:
            merged[-1] = (lab, merged[-1][1] + d)
        else:
            merged.append((lab, d))
    assert dominant_label(segments) == dominant_label(merged)


# -- validation ---------------------------------------------------------------


@pytest.fixture
def inventory():
    return WindowInventory(window_length_s=10.0, videos={"v1": 5})


def test_validate_clean_annotation(inventory):
    assert validate_annotation(annotation_for("v1", 0), inventory) == []


def test_validate_oov_context(inventory):
    a = annotation_for("v1", 0, context="STREET")
    errors = validate_annotation(a, inventory)
    assert any(e["field"] == "context" and e["code"] == "oov" for e in errors)


def test_validate_dangling_key(inventory):
    errors = validate_annotation(annotation_for("v1", 7), inventory)
    assert any(e["code"] == "dangling" for e in errors)


def test_store_add_rejects_invalid(inventory):
    store = LabelStore()
    with pytest.raises(AnnotationError):
        store.add(annotation_for("v1", 0, activity="SPRINT"), inventory)
    assert len(store) == 0


def test_store_add_updates_revision(inventory):
    store = LabelStore()
    assert store.add(annotation_for("v1", 0), inventory) == 1
    assert store.add(annotation_for("v1", 0, context="INDOOR"), inventory) == 2
    assert len(store) == 1
    assert store.get("v1:00000", 1).context == "INDOOR"


# -- store round trips ---------------------------------------------------------


def make_store():
    store = LabelStore()
    labels = [
        ("OUTDOOR", "ROUTINE"),
        ("LOW_VIS", "UNKNOWN"),
        ("INDOOR", "HIGH_ACTIVITY"),
        ("PATROL_VEHICLE", "ROUTINE"),
    ]
    for i, (c, a) in enumerate(labels):
        store.add_raw(annotation_for("v1", i, context=c, activity=a, context_transition=(i == 2)))
        store.add_raw(annotation_for("v1", i, context=c, activity=a, pass_id=2))
    return store


def test_csv_round_trip_is_byte_identical(tmp_path):
    store = make_store()
    first = tmp_path / "labels.csv"
    export_csv(store, first)
    loaded = import_csv(first)
    second = tmp_path / "labels2.csv"
    export_csv(loaded, second)
    assert first.read_bytes() == second.read_bytes()
    assert b"\r" not in first.read_bytes()
    header = first.read_text().splitlines()[0]
    assert header == "key,context,activity,context_transition,activity_transition,pass_id,annotator_id,created_at"


def test_jsonl_round_trip_is_byte_identical(tmp_path):
    store = make_store()
    first = tmp_path / "labels.jsonl"
    export_jsonl(store, first)
    loaded = import_jsonl(first)
    second = tmp_path / "labels2.jsonl"
    export_jsonl(loaded, second)
    assert first.read_bytes() == second.read_bytes()


# -- agreement ------------------------------------------------------------------


def passes_from(labels1, labels2, axis="context"):
    p1, p2 = {}, {}
    for i, (a, b) in enumerate(zip(labels1, labels2)):
        kw1 = {axis: a} if axis == "context" else {"activity": a}
        kw2 = {axis: b} if axis == "context" else {"activity": b}
        p1[f"v:{i:05d}"] = annotation_for("v", i, **kw1)
        p2[f"v:{i:05d}"] = annotation_for("v", i, pass_id=2, **kw2)
    return p1, p2


def test_exact_agreement_values():
    p1, p2 = passes_from(["OUTDOOR"] * 4, ["OUTDOOR"] * 4)
    assert exact_agreement(p1, p2, "context") == 1.0
    p1, p2 = passes_from(["OUTDOOR", "OUTDOOR", "INDOOR", "INDOOR"], ["OUTDOOR", "OUTDOOR", "INDOOR", "LOW_VIS"])
    assert exact_agreement(p1, p2, "context") == 0.75
    p1, p2 = passes_from(["OUTDOOR", "INDOOR"], ["INDOOR", "OUTDOOR"])
    assert exact_agreement(p1, p2, "context") == 0.0


def test_exact_agreement_rejects_key_mismatch():
    p1, p2 = passes_from(["OUTDOOR"], ["OUTDOOR"])
    p2["other:00000"] = annotation_for("other", 0, pass_id=2)
    with pytest.raises(ValueError):
        exact_agreement(p1, p2, "context")


def test_kappa_identical_passes():
    p1, p2 = passes_from(["OUTDOOR", "INDOOR", "OUTDOOR"], ["OUTDOOR", "INDOOR", "OUTDOOR"])
    assert cohens_kappa(p1, p2, "context") == pytest.approx(1.0)


def test_kappa_hand_worked_half():
    # pass1 = A A B B, pass2 = A B B B -> p_o = 0.75, p_e = 0.5, kappa = 0.5
    p1, p2 = passes_from(
        ["OUTDOOR", "OUTDOOR", "INDOOR", "INDOOR"],
        ["OUTDOOR", "INDOOR", "INDOOR", "INDOOR"],
    )
    assert cohens_kappa(p1, p2, "context") == pytest.approx(0.5, abs=1e-9)


def test_kappa_constant_versus_balanced_is_zero():
    # pass1 = 50/50 over two labels, pass2 constant -> p_o = p_e = 0.5
    p1, p2 = passes_from(
        ["OUTDOOR", "INDOOR", "OUTDOOR", "INDOOR"],
        ["OUTDOOR", "OUTDOOR", "OUTDOOR", "OUTDOOR"],
    )
    assert cohens_kappa(p1, p2, "context") == pytest.approx(0.0, abs=1e-9)


def test_kappa_degenerate_constant_passes():
    # Both passes constant on the same label: p_e = 1 with p_o = 1 -> 1.0.
    p1, p2 = passes_from(["OUTDOOR"] * 3, ["OUTDOOR"] * 3)
    assert cohens_kappa(p1, p2, "context") == 1.0
    # Constant but different labels is NOT the degenerate case: p_e = 0.
    p1, p2 = passes_from(["OUTDOOR", "OUTDOOR"], ["INDOOR", "INDOOR"])
    assert cohens_kappa(p1, p2, "context") == pytest.approx(0.0)


@given(
    st.lists(
        st.tuples(st.sampled_from(CONTEXT_LABELS), st.sampled_from(CONTEXT_LABELS)),
        min_size=1,
        max_size=40,
    )
)
@settings(max_examples=80)
def test_kappa_never_exceeds_accuracy_and_is_symmetric(pairs):
    p1, p2 = passes_from([a for a, _ in pairs], [b for _, b in pairs])
    acc = exact_agreement(p1, p2, "context")
    try:
        kappa = cohens_kappa(p1, p2, "context")
    except ValueError:
        return  # degenerate p_e = 1 with disagreement
    assert kappa <= acc + 1e-12
    assert cohens_kappa(p2, p1, "context") == pytest.approx(kappa)


def test_agreement_matrix_counts_and_normalization():
    p1, p2 = passes_from(
        ["OUTDOOR", "OUTDOOR", "INDOOR", "INDOOR"],
        ["OUTDOOR", "INDOOR", "INDOOR", "INDOOR"],
    )
    m = agreement_matrix(p1, p2, "context")
    vocab = vocabulary("context")
    io, ii = vocab.index("OUTDOOR"), vocab.index("INDOOR")
    assert m[io, io] == 1 and m[io, ii] == 1 and m[ii, ii] == 2
    assert m.sum() == 4
    norm = agreement_matrix(p1, p2, "context", row_normalize=True)
    assert norm[io].tolist() == pytest.approx([0.0, 0.5, 0.5, 0.0], abs=1e-9)
    # Unused vocabulary rows are retained as zeros.
    assert norm[vocab.index("LOW_VIS")].tolist() == [0.0, 0.0, 0.0, 0.0]
    for row in norm:
        assert row.sum() == pytest.approx(1.0, abs=1e-9) or row.sum() == 0.0


def test_agreement_matrix_transposes_when_passes_swap():
    p1, p2 = passes_from(
        ["OUTDOOR", "LOW_VIS", "INDOOR", "PATROL_VEHICLE", "OUTDOOR"],
        ["LOW_VIS", "LOW_VIS", "OUTDOOR", "PATROL_VEHICLE", "INDOOR"],
    )
    m12 = agreement_matrix(p1, p2, "context")
    m21 = agreement_matrix(p2, p1, "context")
    assert np.array_equal(m12.T, m21)


def test_identical_passes_give_diagonal_matrix():
    labels = ["ROUTINE", "FOOT_PURSUIT", "ROUTINE", "UNKNOWN"]
    p1, p2 = passes_from(labels, labels, axis="activity")
    m = agreement_matrix(p1, p2, "activity")
    assert np.array_equal(m, np.diag(np.diag(m)))
    assert m.sum() == len(labels)
    assert set(ACTIVITY_LABELS) == set(vocabulary("activity"))
