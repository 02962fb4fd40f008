import numpy as np

from vtimeline.audits import build_audit_report
from vtimeline.corpus import WindowInventory
from vtimeline.evaluation import evaluate, recurring_confusions
from vtimeline.plots import (
    save_audit_figures,
    save_label_distribution,
    save_matrix_heatmap,
    save_recurring_confusions,
    save_transition_counts,
)

from conftest import store_from_sequences

SPACE = ["R", "H", "F", "U"]


def sample_report():
    store = store_from_sequences(
        context_seqs={"v1": ["OUTDOOR", "OUTDOOR", "LOW_VIS", "INDOOR"], "v2": ["PATROL_VEHICLE"] * 3},
        activity_seqs={"v1": ["ROUTINE", "HIGH_ACTIVITY", "ROUTINE", "ROUTINE"], "v2": ["ROUTINE"] * 3},
    )
    inv = WindowInventory(10.0, {"v1": 4, "v2": 3})
    return build_audit_report(store, inv)


def assert_png(path):
    assert path.exists()
    assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert path.stat().st_size > 1000


def test_audit_figure_set(tmp_path):
    paths = save_audit_figures(sample_report(), tmp_path)
    assert [p.name for p in paths] == [
        "label_distribution.png",
        "transitions_context.png",
        "transitions_activity.png",
    ]
    for p in paths:
        assert_png(p)


def test_individual_figures(tmp_path):
    report = sample_report()
    assert_png(save_label_distribution(report.distributions, tmp_path / "dist.png"))
    assert_png(save_transition_counts(report.transitions["context"], tmp_path / "trans.png"))


def test_matrix_heatmap_raw_and_normalized(tmp_path):
    raw = np.array([[5, 1], [0, 3]], dtype=float)
    assert_png(save_matrix_heatmap(raw, ["A", "B"], tmp_path / "raw.png", title="raw counts"))
    norm = raw / raw.sum(axis=1, keepdims=True)
    assert_png(
        save_matrix_heatmap(
            norm, ["A", "B"], tmp_path / "norm.png", title="normalized", normalized=True
        )
    )


def test_recurring_confusions_figure(tmp_path):
    reports = [
        evaluate(["R", "R", "H"], ["H", "H", "H"], SPACE, run_id="r1"),
        evaluate(["R", "H", "F"], ["H", "H", "R"], SPACE, run_id="r2"),
    ]
    ranked = recurring_confusions(reports)
    assert ranked
    assert_png(save_recurring_confusions(ranked, tmp_path / "rec.png", title="recurring"))
