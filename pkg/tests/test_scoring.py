import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import trace_from_labels
from gazesa.errors import EmptyTrace, TooFewTrials, TooShort
from gazesa.model import GazeTrace
from gazesa.numerics import pearson, spearman
from gazesa.scoring import (
    SCORE_COLUMNS,
    MotionDeltaSeries,
    deltas_from_positions,
    motion_deltas,
    sa_l1,
    sa_l2,
    sa_l3_batch,
    sa_l3_components,
    sa_overall_batch,
    score_features,
    score_traces,
    trial_features,
)
from gazesa.segmentation import segment_runs
from gazesa.synth import SynthConfig, ar1, generate_trial


def seg_of(s, **kw):
    return segment_runs(trace_from_labels([None if c == "." else c for c in s]), **kw)


# -- SA_L1 / SA_L2 worked examples -------------------------------------------


def test_sa_l1_worked_examples():
    assert sa_l1(seg_of("AAABBCCCCA")) == pytest.approx(0.7, abs=1e-9)
    assert sa_l1(seg_of("AAAAAA")) == 0.0
    assert sa_l1(seg_of("AB")) == pytest.approx(0.5, abs=1e-9)


def test_sa_l2_worked_examples():
    # first run (X) is not an event, leaving event lengths [2, 4] and [3, 3]
    two_four = (2 * oracles.normal_pdf(-1.0) + 4 * oracles.normal_pdf(1.0)) / 10
    three_three = 6 * oracles.normal_pdf(0.0) / 10
    assert sa_l2(seg_of("XXXXAABBBB")) == pytest.approx(two_four, abs=1e-9)
    assert sa_l2(seg_of("XXXXAAABBB")) == pytest.approx(three_three, abs=1e-9)
    assert two_four == pytest.approx(0.14518, abs=1e-5)
    assert three_three == pytest.approx(0.23936, abs=1e-5)
    assert sa_l2(seg_of("AAAA")) == 0.0


def test_single_event_scores_at_peak():
    assert sa_l2(seg_of("AAB")) == pytest.approx(oracles.normal_pdf(0.0) / 3, abs=1e-12)


def test_empty_trace_errors():
    seg = segment_runs(GazeTrace("e", ()))
    with pytest.raises(EmptyTrace):
        sa_l1(seg)
    with pytest.raises(EmptyTrace):
        sa_l2(seg)


def test_pooled_statistics_override():
    seg = seg_of("XXXXAAABBB")
    # pooled mean 4, std 1: both events at z = -1
    assert sa_l2(seg, (4.0, 1.0)) == pytest.approx(6 * oracles.normal_pdf(1.0) / 10, abs=1e-12)


label_strings = st.lists(st.sampled_from(["A", "B", "C", None]), min_size=1, max_size=60)


@settings(max_examples=200, deadline=None)
@given(label_strings)
def test_level_score_bounds(labels):
    seg = segment_runs(trace_from_labels(labels))
    l1, l2 = sa_l1(seg), sa_l2(seg)
    assert 0.0 <= l1 <= 1.0
    assert 0.0 <= l2 <= 0.3990
    assert l2 <= l1 / math.sqrt(2 * math.pi) + 1e-15
    # L1 reduces to total event length over trace length
    assert l1 == pytest.approx(sum(r.length for r in seg.events) / len(labels), abs=1e-12)


# -- motion deltas -----------------------------------------------------------


def test_left_turn_is_positive():
    d = deltas_from_positions([(0, 0), (1, 0), (1, 1)])
    assert d.dir.tolist() == [1.0]
    assert deltas_from_positions([(0, 0), (1, 0), (1, -1)]).dir.tolist() == [-1.0]


def test_speed_delta_log_scale():
    d = deltas_from_positions([(0, 0), (1.0, 0), (2.01, 0)])
    assert d.spd[0] == pytest.approx(2.0, abs=1e-9)
    slower = deltas_from_positions([(0, 0), (2.0, 0), (3.0, 0)])
    # step shrinks by 1.0 -> -(-1) * log10(1) = 0
    assert slower.spd[0] == pytest.approx(0.0, abs=1e-12)
    big = deltas_from_positions([(0, 0), (1.0, 0), (102.0, 0)])
    assert big.spd[0] == pytest.approx(-2.0, abs=1e-12)


def test_collinear_equal_spacing():
    d = deltas_from_positions([(i, 0) for i in range(6)])
    assert d.dir.tolist() == [0.0] * 4
    assert d.spd.size == 0 and d.dropped_zero_deltas == 4


def test_repeated_points_dropped_before_pairing():
    d = deltas_from_positions([(0, 0), (1, 0), (1, 0), (1, 1)])
    assert d.dropped_zero_vectors == 1
    assert d.dir.tolist() == [1.0]


def test_motion_deltas_requires_four_samples():
    trace = trace_from_labels(["A", "A", "A"])
    with pytest.raises(TooShort):
        motion_deltas(trace)
    assert len(motion_deltas(trace_from_labels(["A"] * 4)).dir) >= 1


points = st.lists(st.tuples(st.integers(-500, 500), st.integers(-500, 500)), min_size=4, max_size=30)


@settings(max_examples=200, deadline=None)
@given(points, st.integers(-10_000, 10_000), st.integers(-10_000, 10_000), st.floats(0.01, 100))
def test_motion_delta_symmetries(pts, dx, dy, scale):
    P = np.array(pts, dtype=float)
    base = deltas_from_positions(P)
    assert np.all(np.abs(base.dir) <= 1.0)
    assert np.all(np.isfinite(base.spd))
    shifted = deltas_from_positions(P + [dx, dy])
    np.testing.assert_array_equal(shifted.dir, base.dir)
    np.testing.assert_array_equal(shifted.spd, base.spd)
    mirrored = deltas_from_positions(P * [1, -1])
    np.testing.assert_array_equal(mirrored.dir, -base.dir)
    scaled = deltas_from_positions(P * scale)
    np.testing.assert_allclose(scaled.dir, base.dir, atol=1e-12)


# -- SA_L3 components --------------------------------------------------------


def test_smooth_turns_carry_information():
    turn = np.tanh(ar1(np.random.default_rng(3), 5000, 0.8))
    l3_dir, _ = sa_l3_components(MotionDeltaSeries(turn, np.zeros(0)))
    assert l3_dir > 0.3


def test_white_noise_carries_none():
    rng = np.random.default_rng(4)
    l3_dir, l3_spd = sa_l3_components(MotionDeltaSeries(rng.uniform(-1, 1, 5000), rng.normal(size=5000)))
    assert abs(l3_dir) <= 0.05 and abs(l3_spd) <= 0.05


def test_degenerate_series_give_zero():
    assert sa_l3_components(MotionDeltaSeries(np.full(200, 0.3), np.zeros(0))) == (0.0, 0.0)
    short = np.random.default_rng(0).normal(size=16)
    assert sa_l3_components(MotionDeltaSeries(short, short)) == (0.0, 0.0)
    # a linear series makes lag-1 pairs collinear
    assert sa_l3_components(MotionDeltaSeries(np.arange(50.0), np.zeros(0))) == (0.0, 0.0)


# -- batch PCA -----------------------------------------------------------------


def test_l3_batch_equal_columns():
    d = np.array([0.1, 0.5, 0.2, 0.9])
    model, scores = sa_l3_batch(np.column_stack([d, d]))
    np.testing.assert_allclose(scores, math.sqrt(2) * oracles.zscore_population(d[:, None])[:, 0], atol=1e-12)
    np.testing.assert_allclose(model.loadings, [1 / math.sqrt(2)] * 2, atol=1e-12)


def test_l3_batch_identical_trials():
    _, scores = sa_l3_batch([[0.3, 0.4], [0.3, 0.4]])
    assert scores.tolist() == [0.0, 0.0]


def test_l3_batch_anticorrelated_orientation():
    d = np.array([0.1, 0.5, 0.2, 0.9])
    model, _ = sa_l3_batch(np.column_stack([d, 1 - d]))
    assert model.loadings[0] > 0
    np.testing.assert_allclose(model.loadings, [1 / math.sqrt(2), -1 / math.sqrt(2)], atol=1e-12)


def test_overall_batch_identical_columns():
    c = np.array([0.2, 0.1, 0.7, 0.4, 0.4])
    model, scores = sa_overall_batch(np.column_stack([c, c, c]))
    np.testing.assert_allclose(model.loadings, [1 / math.sqrt(3)] * 3, atol=1e-12)
    np.testing.assert_allclose(scores, math.sqrt(3) * oracles.zscore_population(c[:, None])[:, 0], atol=1e-12)


def test_overall_batch_constant_column_embeds_two_feature_fit():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(9, 3))
    X[:, 1] = 0.25
    m3, s3 = sa_overall_batch(X)
    m2, s2 = sa_l3_batch(X[:, [0, 2]])
    assert m3.loadings[1] == 0.0
    np.testing.assert_allclose(m3.loadings[[0, 2]], m2.loadings, atol=1e-12)
    np.testing.assert_allclose(s3, s2, atol=1e-12)


def test_batch_needs_two_trials():
    with pytest.raises(TooFewTrials):
        sa_overall_batch([[0.1, 0.2, 0.3]])
    with pytest.raises(TooFewTrials):
        sa_l3_batch([[0.1, 0.2]])


def test_latent_factor_batches_keep_rank_order():
    rng = np.random.default_rng(30)
    checked = 0
    for _ in range(200):
        n = int(rng.integers(8, 40))
        latent = rng.normal(size=n)
        X = latent[:, None] + rng.uniform(0.2, 1.5, size=3) * rng.normal(size=(n, 3))
        rhos = [spearman(X[:, i], X[:, j]).coefficient for i, j in ((0, 1), (0, 2), (1, 2))]
        if min(rhos) < 0:
            continue
        checked += 1
        _, scores = sa_overall_batch(X)
        assert abs(scores.mean()) < 1e-12
        for i in range(3):
            assert spearman(scores, X[:, i]).coefficient >= 0
            assert pearson(scores, X[:, i]).coefficient >= 0
    assert checked > 100


# -- end to end ------------------------------------------------------------------


def _synth(theta, seed, seconds=8.0):
    return generate_trial(SynthConfig(theta, seed=seed, duration_s=seconds, trial_id=f"s{seed}")).gaze


def test_score_traces_shape_and_columns():
    traces = [_synth(t, i) for i, t in enumerate((0.1, 0.5, 0.9))]
    batch = score_traces(traces)
    assert [s.trial_id for s in batch.scores] == ["s0", "s1", "s2"]
    for s in batch.scores:
        row = s.row()
        assert len(row) == len(SCORE_COLUMNS) == 7
        assert all(isinstance(v, float) and math.isfinite(v) for v in row[1:])
    assert abs(sum(s.sa_overall for s in batch.scores)) < 1e-9
    assert batch.overall_model.loadings.shape == (3,)


def test_pooled_switch_changes_only_l2():
    feats = [trial_features(_synth(t, i)) for i, t in enumerate((0.0, 0.4, 1.0))]
    own = score_features(feats)
    pooled = score_features(feats, l2_pooled=True)
    assert [s.sa_l1 for s in own.scores] == [s.sa_l1 for s in pooled.scores]
    assert [s.sa_l2 for s in own.scores] != [s.sa_l2 for s in pooled.scores]


def test_single_trial_keeps_partial_scores():
    with pytest.raises(TooFewTrials) as info:
        score_features([trial_features(_synth(0.5, 1))])
    (partial,) = info.value.partial
    assert partial.trial_id == "s1" and partial.sa_l3 is None and partial.sa_overall is None
