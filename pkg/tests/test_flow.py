import numpy as np
import pytest

from vtimeline import imgio
from vtimeline.features.flow import (
    FLOW_PRESETS,
    FlowParams,
    MOTION_FIELDS,
    farneback_flow,
    motion_layout,
    motion_summary,
    window_motion_summary,
)
from vtimeline.synthetic import smooth_texture

F4 = FLOW_PRESETS["F4"].params


@pytest.fixture(scope="module")
def texture():
    return imgio.to_uint8(smooth_texture(180, 320, 28.0, seed=7) + 130.0)


def mean_mag(flow):
    return float(np.hypot(flow[..., 0], flow[..., 1]).mean())


def test_presets_match_run_grid():
    assert FLOW_PRESETS["F1"].k == 5
    assert (FLOW_PRESETS["F1"].params.resize_w, FLOW_PRESETS["F1"].params.resize_h) == (224, 126)
    assert FLOW_PRESETS["F3"].params.window_size == 9
    assert FLOW_PRESETS["F4"].params.window_size == 21
    assert FLOW_PRESETS["F5"].params.pyramid_levels == 4
    assert FLOW_PRESETS["F6"].params.iterations == 5
    for preset in FLOW_PRESETS.values():
        assert preset.params.poly_n == 7 and preset.params.poly_sigma == 1.5


def test_flow_params_validation():
    with pytest.raises(ValueError):
        FlowParams(0, 180, 21, 3, 3)
    with pytest.raises(ValueError):
        FlowParams(320, 180, 21, 3, 3, poly_sigma=0.0)


def test_identical_frames_give_near_zero_flow(texture):
    assert mean_mag(farneback_flow(texture, texture, F4)) < 0.05


def test_known_shift_recovered_within_20pct(texture):
    shifted = np.roll(texture, 3, axis=1)
    flow = farneback_flow(texture, shifted, F4)
    gx = float(flow[..., 0].mean())
    gy = float(flow[..., 1].mean())
    assert abs(gx - 3.0) <= 0.6
    assert abs(gy) <= 0.6


def test_constant_frames_give_near_zero_flow():
    flat = np.full((180, 320), 128, dtype=np.uint8)
    assert mean_mag(farneback_flow(flat, flat, F4)) < 0.05


def test_flow_rejects_shape_mismatch(texture):
    with pytest.raises(ValueError):
        farneback_flow(texture, texture[:90], F4)


def test_flow_linearity_doubling(texture):
    one = farneback_flow(texture, np.roll(texture, 1, axis=1), F4)[..., 0].mean()
    two = farneback_flow(texture, np.roll(texture, 2, axis=1), F4)[..., 0].mean()
    assert two == pytest.approx(2.0 * one, rel=0.25)


def test_flow_resizes_input_to_working_resolution(texture):
    big = np.kron(texture, np.ones((2, 2), dtype=np.uint8))  # 360x640
    flow = farneback_flow(big, big, F4)
    assert flow.shape == (180, 320, 2)


# -- motion summary ---------------------------------------------------------------


def test_motion_summary_single_frame_zero_fills(texture):
    summary = motion_summary([], [texture.astype(np.float64)], k=10)
    vec = summary.to_vector()
    assert vec[:8].tolist() == [0.0] * 8
    assert summary.n_frames == 1.0
    assert summary.luma_mean == pytest.approx(float(texture.mean()), rel=1e-6)
    assert summary.luma_std == 0.0


def test_motion_summary_no_frames_all_zero():
    summary = motion_summary([], [], k=10)
    assert summary.to_vector()[:11].tolist() == [0.0] * 11
    assert summary.n_frames == 0.0


def test_motion_summary_identical_frames(texture):
    frames = [texture] * 5
    summary = window_motion_summary(frames, F4, k=5)
    assert summary.n_frames == 5.0
    assert summary.mag_mean_mean < 0.05
    assert summary.global_flow_mag_mean < 0.05


def test_motion_summary_uniform_translation(texture):
    frames = [np.roll(texture, 3 * i, axis=1) for i in range(5)]
    summary = window_motion_summary(frames, F4, k=5)
    assert summary.dir_coherence_mean >= 0.95
    assert summary.global_flow_mag_mean == pytest.approx(3.0, rel=0.2)
    assert 0.0 <= summary.dir_coherence_mean <= 1.0


def test_motion_summary_brightness_offset_invariance(texture):
    base = [np.roll(texture, 2 * i, axis=1) for i in range(4)]
    brighter = [imgio.to_uint8(f.astype(np.float64) + 10.0) for f in base]
    s0 = window_motion_summary(base, F4, k=4)
    s1 = window_motion_summary(brighter, F4, k=4)
    for field in ("mag_mean_mean", "global_flow_mag_mean"):
        v0, v1 = getattr(s0, field), getattr(s1, field)
        assert abs(v1 - v0) <= 0.1 * max(v0, 1e-6)


def test_motion_summary_has_exactly_twelve_named_fields(texture):
    summary = window_motion_summary([texture, texture], F4, k=2)
    assert len(MOTION_FIELDS) == 12
    assert summary.to_vector().shape == (12,)
    layout = motion_layout("F4", 10)
    for name in MOTION_FIELDS:
        assert name in layout


def test_motion_summary_validates_flow_count(texture):
    with pytest.raises(ValueError):
        motion_summary([], [texture, texture], k=5)  # 2 frames need 1 flow
    with pytest.raises(ValueError):
        motion_summary([], [texture] * 6, k=5)  # more frames than K
