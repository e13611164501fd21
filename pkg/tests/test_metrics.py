"""Tests for rkldwf.metrics"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rkldwf.core.errors import ArgumentError
from rkldwf.metrics import (
    CURVE_COLUMNS,
    TRIAL_COLUMNS,
    TrialCurve,
    TrialRecord,
    acc,
    acc_over_images,
    aggregate,
    aggregate_curves,
    are,
    correlation,
    error_curve,
    snr_db,
    success_interval,
    success_probability,
)


def _record(rel_err, dist=None, algorithm="rkld-wf-gaussian", value=6.0, trial=0, iterations=10):
    return TrialRecord(
        seed=trial, sweep_var="alpha", sweep_value=value, algorithm=algorithm, trial=trial,
        dist=rel_err if dist is None else dist, rel_err=rel_err, iterations=iterations,
        success=(rel_err if dist is None else dist) < 1e-5, acc=1.0 - rel_err,
    )


class TestErrorMetrics:
    """Tests for ARE and success probability."""

    def test_are(self):
        """Mean relative error over the trials."""
        assert are([_record(0.1), _record(0.3)]) == pytest.approx(0.2)

    def test_success_is_strict(self):
        """dist equal to the threshold is a failure."""
        records = [_record(0.0, dist=1e-5), _record(0.0, dist=9.9e-6)]
        assert success_probability(records) == 0.5

    def test_relative_success(self):
        """The relative flag compares rel_err instead of dist."""
        records = [_record(1e-6, dist=1e-3)]
        assert success_probability(records) == 0.0
        assert success_probability(records, relative=True) == 1.0

    def test_empty(self):
        """Empty record sets are rejected."""
        with pytest.raises(ArgumentError):
            are([])
        with pytest.raises(ArgumentError):
            success_probability([])

    def test_success_interval(self):
        """The Clopper-Pearson interval brackets the point estimate."""
        records = [_record(0.0, dist=0.0)] * 7 + [_record(1.0)] * 3
        low, high = success_interval(records)
        assert low < 0.7 < high
        assert 0.0 <= low and high <= 1.0

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=40),
           st.randoms(use_true_random=False))
    def test_order_invariance(self, errors, shuffler):
        """ARE and success probability do not depend on record order."""
        records = [_record(e, trial=i) for i, e in enumerate(errors)]
        shuffled = list(records)
        shuffler.shuffle(shuffled)
        assert are(shuffled) == are(records)
        assert success_probability(shuffled) == success_probability(records)


class TestSignalMetrics:
    """Tests for SNR and correlation metrics."""

    def test_snr(self):
        """A variance ratio of 100 is 20 dB."""
        y_clean = np.array([0.0, 20.0])
        w = np.array([0.0, 2.0])
        assert snr_db(y_clean, w) == pytest.approx(20.0)

    def test_snr_zero_noise(self):
        """Zero noise variance is rejected."""
        with pytest.raises(ArgumentError):
            snr_db(np.array([1.0, 2.0]), np.zeros(2))

    def test_correlation(self):
        """Phase does not matter; orthogonal vectors give 0."""
        x = np.array([1.0, 1j, -2.0])
        assert correlation(x, np.exp(0.3j) * 5.0 * x) == pytest.approx(1.0)
        assert correlation(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0
        with pytest.raises(ArgumentError):
            correlation(x, np.zeros(3))
        with pytest.raises(ArgumentError):
            correlation(x, np.ones(2))

    def test_acc(self):
        """ACC averages correlations over reconstructions and then over images."""
        x = np.array([1.0, 0.0])
        value = acc(x, [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        assert value == pytest.approx(0.5)
        assert acc_over_images([0.5, 1.0]) == pytest.approx(0.75)
        with pytest.raises(ArgumentError):
            acc(x, [])


class TestAggregate:
    """Tests for per-group aggregation."""

    def test_groups(self):
        """One row per (algorithm, sweep value) in order of first appearance."""
        records = [
            _record(0.1, value=4.0, trial=0),
            _record(0.0, dist=0.0, algorithm="wf-l2", value=4.0, trial=0, iterations=30),
            _record(0.3, value=4.0, trial=1),
            _record(0.0, dist=0.0, value=6.0, trial=0),
        ]
        rows = aggregate(records)
        assert [(r.algorithm, r.sweep_value) for r in rows] == [
            ("rkld-wf-gaussian", 4.0), ("wf-l2", 4.0), ("rkld-wf-gaussian", 6.0),
        ]
        assert rows[0].trials == 2
        assert rows[0].are == pytest.approx(0.2)
        assert rows[1].success_probability == 1.0
        assert rows[1].mean_iterations == 30.0

    def test_shuffled_records(self):
        """Shuffling records does not change any aggregate value."""
        records = [_record(0.01 * i, value=float(i % 3), trial=i) for i in range(30)]
        shuffled = list(records)
        random.Random(0).shuffle(shuffled)
        by_key = {(r.algorithm, r.sweep_value): r.to_row() for r in aggregate(records)}
        for row in aggregate(shuffled):
            assert row.to_row() == by_key[(row.algorithm, row.sweep_value)]

    def test_trial_row(self):
        """Trial rows follow the CSV column order with 0/1 success."""
        row = _record(0.0, dist=0.0).to_row()
        assert list(row) == TRIAL_COLUMNS
        assert row["success"] == 1

    def test_confidence_bounds(self):
        """Aggregate rows carry the Clopper-Pearson bounds of their success rate."""
        records = [_record(0.0, dist=0.0, trial=i) for i in range(8)] + [_record(0.5, trial=8)]
        row = aggregate(records)[0]
        assert (row.success_ci_low, row.success_ci_high) == success_interval(records)
        assert row.success_ci_low < row.success_probability < row.success_ci_high


class TestCurves:
    """Tests for ARE-vs-iteration curves."""

    def test_error_curve_pads_and_caps(self):
        """Early stops carry their last error; large and missing errors hit the cap."""
        assert error_curve([0.5, 0.1, 0.01], 5, cap=10.0) == [0.5, 0.1, 0.01, 0.01, 0.01]
        assert error_curve([20.0, float("nan"), None], 3, cap=10.0) == [10.0, 10.0, 10.0]
        assert error_curve([0.4, 0.3, 0.2], 2, cap=10.0) == [0.4, 0.3]
        assert error_curve([], 2, cap=10.0) == [10.0, 10.0]

    def test_error_curve_length(self):
        """A curve needs at least one iteration."""
        with pytest.raises(ArgumentError):
            error_curve([0.1], 0, cap=10.0)

    def test_mean_per_iteration(self):
        """Rows average the trials of each group at every iteration."""
        curves = [
            TrialCurve("rkld-wf-gaussian", "alpha", 6.0, 0, [0.4, 0.2, 0.1]),
            TrialCurve("rkld-wf-gaussian", "alpha", 6.0, 1, [0.2, 0.1, 0.0]),
            TrialCurve("wf-l2", "alpha", 6.0, 0, [0.5, 0.5]),
        ]
        rows = aggregate_curves(curves)
        assert [(r.algorithm, r.iteration) for r in rows] == [
            ("rkld-wf-gaussian", 0), ("rkld-wf-gaussian", 1), ("rkld-wf-gaussian", 2),
            ("wf-l2", 0), ("wf-l2", 1),
        ]
        assert [r.are for r in rows[:3]] == pytest.approx([0.3, 0.15, 0.05])
        assert rows[0].trials == 2
        assert list(rows[0].to_row()) == CURVE_COLUMNS
