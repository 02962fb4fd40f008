import numpy as np
import pytest

from vtimeline.annotation import ACTIVITY_LABELS
from vtimeline.evaluation import (
    clean_eval_pairs,
    confusion_matrix,
    evaluate,
    filter_clean,
    recurring_confusions,
    write_confusion_csvs,
)

from conftest import annotation_for

SPACE = ["R", "H", "F", "U"]


def test_perfect_predictions():
    report = evaluate(["R", "H", "F"], ["R", "H", "F"], SPACE)
    assert report.accuracy == 1.0
    # U never occurs at all, so its F1 of 0 caps macro-F1 below 1 over the
    # full declared space.
    assert report.macro_f1 == pytest.approx(0.75)
    full = evaluate(["R", "H"], ["R", "H"], ["R", "H"])
    assert full.macro_f1 == 1.0


def test_hand_worked_four_sample_case():
    report = evaluate(["R", "R", "R", "H"], ["R", "R", "H", "H"], SPACE)
    assert report.accuracy == pytest.approx(0.75)
    assert report.per_class["R"]["precision"] == pytest.approx(1.0)
    assert report.per_class["R"]["recall"] == pytest.approx(2 / 3)
    assert report.per_class["R"]["f1"] == pytest.approx(0.8)
    assert report.per_class["H"]["f1"] == pytest.approx(2 / 3, abs=1e-9)
    assert report.macro_f1 == pytest.approx(0.3667, abs=1e-4)


def test_absent_class_contributes_zero():
    report = evaluate(["R", "R"], ["R", "R"], SPACE)
    assert report.per_class["F"]["f1"] == 0.0
    assert report.macro_f1 == pytest.approx(0.25)


def test_evaluate_validation():
    with pytest.raises(ValueError):
        evaluate([], [], SPACE)
    with pytest.raises(ValueError):
        evaluate(["R"], ["R", "H"], SPACE)
    with pytest.raises(ValueError):
        evaluate(["R"], ["X"], SPACE)


def test_accuracy_equals_trace_over_sum():
    rng = np.random.default_rng(0)
    y_true = rng.choice(SPACE, 100).tolist()
    y_pred = rng.choice(SPACE, 100).tolist()
    report = evaluate(y_true, y_pred, SPACE)
    raw = np.array(report.confusion_raw)
    assert report.accuracy == pytest.approx(np.trace(raw) / raw.sum())


def test_evaluate_invariant_under_label_renaming():
    y_true = ["R", "R", "H", "F", "R", "H"]
    y_pred = ["R", "H", "H", "R", "R", "F"]
    base = evaluate(y_true, y_pred, SPACE)
    mapping = {"R": "q", "H": "w", "F": "e", "U": "t"}
    renamed = evaluate(
        [mapping[t] for t in y_true],
        [mapping[p] for p in y_pred],
        [mapping[lab] for lab in SPACE],
    )
    assert renamed.accuracy == base.accuracy
    assert renamed.macro_f1 == base.macro_f1
    assert renamed.confusion_raw == base.confusion_raw


# -- confusion matrix ------------------------------------------------------------


def test_confusion_matrix_hand_count():
    m = confusion_matrix(["R", "R", "R", "H"], ["R", "R", "H", "H"], SPACE)
    assert m[0].tolist() == [2, 1, 0, 0]
    assert m[1].tolist() == [0, 1, 0, 0]
    diag = confusion_matrix(["R", "H"], ["R", "H"], SPACE)
    assert np.array_equal(diag, np.diag(np.diag(diag)))


def test_confusion_matrix_normalized_rows():
    m = confusion_matrix(["R", "R", "R", "H"], ["R", "R", "H", "H"], SPACE, normalize=True)
    assert m[0].tolist() == pytest.approx([2 / 3, 1 / 3, 0, 0])
    assert m[2].tolist() == [0, 0, 0, 0]  # empty class keeps its zero row


# -- clean filtering ----------------------------------------------------------------


def test_filter_clean_drops_flagged():
    rows = []
    for i in range(428):
        rows.append(
            annotation_for(
                "v",
                i,
                context_transition=(i < 25),
                activity_transition=(25 <= i < 61),
            )
        )
    clean = filter_clean(rows)
    assert len(clean) == 367
    assert filter_clean([annotation_for("v", 0)]) == [annotation_for("v", 0)]
    flagged = [annotation_for("v", i, context_transition=True) for i in range(3)]
    assert filter_clean(flagged) == []


def test_clean_eval_pairs_alignment():
    from vtimeline.annotation import LabelStore

    store = LabelStore()
    store.add_raw(annotation_for("v", 0, activity="ROUTINE"))
    store.add_raw(annotation_for("v", 1, activity="HIGH_ACTIVITY", activity_transition=True))
    store.add_raw(annotation_for("v", 2, activity="FOOT_PURSUIT"))
    preds = {"v:00000": "ROUTINE", "v:00001": "ROUTINE", "v:00002": "ROUTINE"}
    y_true, y_pred, excluded = clean_eval_pairs(store, preds, "activity")
    assert y_true == ["ROUTINE", "FOOT_PURSUIT"]
    assert y_pred == ["ROUTINE", "ROUTINE"]
    assert excluded == 1


# -- recurring confusions --------------------------------------------------------------


def test_recurring_confusions_single_and_double():
    rep1 = evaluate(["R", "R", "H"], ["H", "H", "H"], SPACE, run_id="run1")
    ranked1 = recurring_confusions([rep1])
    assert ranked1[0] == {"true": "R", "pred": "H", "total": 2, "per_run": {"run1": 2}}
    rep2 = evaluate(["R", "R", "H"], ["H", "H", "H"], SPACE, run_id="run2")
    ranked2 = recurring_confusions([rep1, rep2])
    assert ranked2[0]["total"] == 4
    assert ranked2[0]["per_run"] == {"run1": 2, "run2": 2}
    # Pairs absent from every run are omitted entirely.
    assert all(e["total"] > 0 for e in ranked2)


def test_recurring_confusions_totals_match_cells():
    rng = np.random.default_rng(1)
    reports = []
    for run in range(3):
        y_true = rng.choice(SPACE, 50).tolist()
        y_pred = rng.choice(SPACE, 50).tolist()
        reports.append(evaluate(y_true, y_pred, SPACE, run_id=f"r{run}"))
    ranked = recurring_confusions(reports)
    total_off_diag = sum(
        rep.confusion_raw[i][j]
        for rep in reports
        for i in range(4)
        for j in range(4)
        if i != j
    )
    assert sum(e["total"] for e in ranked) == total_off_diag


def test_recurring_confusions_rejects_mismatched_spaces():
    rep1 = evaluate(["R"], ["R"], SPACE)
    rep2 = evaluate(["ROUTINE"], ["ROUTINE"], list(ACTIVITY_LABELS))
    with pytest.raises(ValueError):
        recurring_confusions([rep1, rep2])


def test_confusion_csv_output(tmp_path):
    report = evaluate(["R", "R", "R", "H"], ["R", "R", "H", "H"], SPACE)
    paths = write_confusion_csvs(report, tmp_path)
    raw = paths[0].read_text().splitlines()
    assert raw[0] == "true\\pred,R,H,F,U"
    assert raw[1] == "R,2,1,0,0"
