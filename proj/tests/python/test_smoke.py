"""End-to-end checks that the compiled module exposes working operations."""

import math

import pytest

import vpforest as vp


def make_config(**overrides):
    cfg = vp.ForestConfig()
    cfg.n_trees = 3
    cfg.memory_bytes = 60000
    cfg.n_features = 2
    cfg.n_classes = 3
    cfg.seed = 42
    vp.apply_default_hyperparams(cfg)
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


def test_exports_complete():
    missing = [name for name in vp.__all__ if not hasattr(vp, name)]
    assert missing == []


def test_rounding_hand_values():
    fmt = vp.make_format(3, 4)
    assert vp.round_to_precision(0.1, fmt) == 0.1015625
    assert vp.round_to_precision(1.0, fmt) == 1.0
    assert vp.dynamic_range(fmt) == (-6, 7)
    assert vp.dynamic_range(vp.make_format(52, 11)) == (-1022, 1023)
    # fmt(52,11) is the native double layout: identity on finite values.
    assert vp.round_to_precision(math.pi, vp.make_format(52, 11)) == math.pi


def test_rounded_arith_ties_to_even():
    fmt = vp.make_format(3, 4)
    assert vp.rounded_arith(vp.ArithOp.Add, 1.0, 0.0625, fmt) == 1.0
    assert vp.rounded_arith(vp.ArithOp.Sub, 1.0, 0.0625, fmt) == 0.9375


def test_overflow_policy_error_raises():
    fmt = vp.make_format(3, 4, vp.OverflowPolicy.Error)
    with pytest.raises(vp.RangeOverflowError):
        vp.round_to_precision(1e9, fmt)


def test_forest_fit_predict():
    forest = vp.MondrianForest(make_config())
    for _ in range(20):
        forest.partial_fit([0.0, 0.0], 0)
        forest.partial_fit([5.0, 5.0], 1)
        forest.partial_fit(vp.StreamSample([-5.0, 5.0], 2))
    assert forest.predict([0.0, 0.0]) == 0
    assert forest.predict([5.0, 5.0]) == 1
    assert forest.predict([-5.0, 5.0]) == 2
    proba = forest.predict_proba([5.0, 5.0])
    assert len(proba) == 3
    assert abs(sum(proba) - 1.0) < 1e-12
    assert 0 < forest.allocated_nodes <= forest.capacity_nodes


def test_footprint_widths():
    cfg = make_config(n_features=12)
    plain = vp.node_footprint(cfg)
    assert plain.int_bytes == plain.float_bytes == 192
    cfg.mode = vp.InstrumentationMode.NodeBounds
    cfg.fmt = vp.make_format(3, 4)
    narrow = vp.node_footprint(cfg)
    # gamma = 8 shrinks the float half to 8/64 of its double size.
    assert plain.total * 9 == narrow.total * 16


def test_prequential_run_on_synthetic():
    # Class k shifts axis k, so with n_classes == n_features every class is
    # separable and cumulative F1 should end high.
    stream = vp.synthesize(3, 3, 400, 7, 6.0)
    assert len(stream) == 400
    forest = vp.MondrianForest(make_config(n_features=3))
    report = vp.prequential_run(forest, stream)
    assert report.status == vp.RunStatus.Ok
    assert report.checkpoints[-1].elements_seen == 400
    assert report.final_f1 > 0.8
    deltas = vp.delta_f1(report, report)
    assert all(d == 0.0 for _, d in deltas)


def test_stream_helpers():
    stream = vp.synthesize(4, 3, 200, 1, 6.0)
    norm = vp.normalize_minmax(stream)
    flat = [x for sample in norm for x in sample.features]
    assert min(flat) == -1.0 and max(flat) == 1.0
    shuffled = vp.shuffle_stream(stream, 9)
    assert sorted(s.label for s in shuffled) == sorted(s.label for s in stream)
    assert [s.label for s in shuffled] != [s.label for s in stream]
    assert vp.shuffle_stream(stream, 9)[0].features == shuffled[0].features


def test_featurize_windows():
    rows = [vp.RawSensorRow([float(i), float(-i)], i % 2) for i in range(100)]
    samples = vp.featurize_windows(rows, 10)
    assert len(samples) == 10
    # Per-axis mean and stddev: 2 axes -> 4 features.
    assert len(samples[0].features) == 4
    assert samples[0].features[0] == 4.5


def test_f1_hand_values():
    assert vp.macro_f1([[1, 1], [1, 1]]) == 0.5
    assert vp.macro_f1([[3, 0], [0, 5]]) == 1.0
    assert vp.micro_f1([[3, 0], [0, 5]]) == 1.0


def test_whole_instrumentation_overflow_raises():
    cfg = make_config(mode=vp.InstrumentationMode.Whole, fmt=vp.make_format(3, 2))
    forest = vp.MondrianForest(cfg)
    with pytest.raises(vp.NonFiniteError):
        for _ in range(50):
            forest.partial_fit([9.0, 0.0], 0)


def test_prequential_captures_overflow():
    cfg = make_config(
        n_classes=2, mode=vp.InstrumentationMode.Whole, fmt=vp.make_format(52, 2)
    )
    stream = vp.synthesize(2, 2, 300, 3, 6.0)
    clamped = [
        vp.StreamSample([max(-3.5, min(3.5, x)) for x in s.features], s.label)
        for s in stream
    ]
    report = vp.prequential_run(vp.MondrianForest(cfg), clamped)
    assert report.status == vp.RunStatus.Overflow
    assert 1 <= report.failed_at <= len(clamped)
    assert report.error != ""
