"""Tests for rkldwf.harness Monte-Carlo experiments"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

import math

import numpy as np
import pytest

from rkldwf.cli_io import load_experiment
from rkldwf.core.errors import ConfigError
from rkldwf.core.rng import Rng
from rkldwf.harness import ExperimentSpec, SignalKind, run_experiment, signal_draw
from rkldwf.metrics import TRIAL_COLUMNS, aggregate
from rkldwf.models.generation import ModelKind
from rkldwf.solver import InitPolicy, SolverConfig


def _small_spec(**overrides):
    params = dict(
        algorithms=["rkld-wf-gaussian", "wf-l2"],
        name="small",
        n=8,
        alphas=[4.0, 6.0],
        trials=2,
        base_seed=11,
        max_iters=20,
    )
    params.update(overrides)
    return ExperimentSpec(**params)


def _without_wall_time(table):
    rows = []
    for record in table.records:
        row = record.to_dict()
        row.pop("wall_ms")
        rows.append(row)
    return rows


class TestSignalDraw:
    """Tests for ground-truth signals."""

    def test_real_gaussian(self):
        """Real signals have a zero imaginary part."""
        x = signal_draw(SignalKind.REAL_GAUSSIAN, 50, Rng(1))
        assert x.dtype == np.complex128
        assert np.all(x.imag == 0)

    def test_complex_gaussian_variance(self):
        """Real and imaginary parts are standard normal."""
        x = signal_draw(SignalKind.COMPLEX_GAUSSIAN, 20000, Rng(2))
        assert np.var(x.real) == pytest.approx(1.0, abs=0.05)
        assert np.var(x.imag) == pytest.approx(1.0, abs=0.05)


class TestExperimentSpec:
    """Tests for experiment validation and sweeps."""

    def test_sweep_points(self):
        """The swept axis is detected and its values become points."""
        spec = _small_spec()
        assert spec.sweep_var == "alpha"
        points = spec.sweep_points()
        assert [p.value for p in points] == [4.0, 6.0]
        assert [p.alpha for p in points] == [4.0, 6.0]

    def test_rho_sweep(self):
        """Corruption axes can be swept at a fixed alpha."""
        spec = _small_spec(alphas=[8.0], thetas=[10.0], rhos=[0.0, 0.1, 0.2])
        assert spec.sweep_var == "rho"
        assert [p.rho for p in spec.sweep_points()] == [0.0, 0.1, 0.2]
        assert all(p.theta == 10.0 for p in spec.sweep_points())

    def test_snr_axis(self):
        """A single target SNR still names the sweep variable."""
        spec = _small_spec(alphas=[8.0], snr_dbs=[20.0])
        assert spec.sweep_var == "snr_db"
        assert spec.sweep_points()[0].snr_db == 20.0

    def test_cdp_axis(self):
        """CDP experiments sweep the pattern count."""
        spec = _small_spec(model=ModelKind.CDP, algorithms=["rkld-wf-cdp"], l_patterns=[4, 6])
        assert spec.sweep_var == "l_patterns"
        assert [p.l_patterns for p in spec.sweep_points()] == [4, 6]

    def test_two_axes_rejected(self):
        """Only one axis may have several values."""
        with pytest.raises(ConfigError):
            _small_spec(rhos=[0.0, 0.1]).validate()

    @pytest.mark.parametrize("overrides", [
        {"algorithms": []},
        {"trials": 0},
        {"algorithms": ["wf-l2", "wf-l2"]},
        {"algorithms": ["no-such-preset"]},
        {"alphas": [-1.0, 2.0]},
        {"alphas": [6.0], "rhos": [1.0]},
    ], ids=["empty", "no-trials", "duplicate", "unknown", "alpha", "rho"])
    def test_invalid(self, overrides):
        """Unrunnable specs raise ConfigError."""
        with pytest.raises(ConfigError):
            _small_spec(**overrides).validate()

    def test_trial_seeds_distinct(self):
        """Every (sweep point, trial) pair gets its own seed."""
        spec = _small_spec(trials=5)
        seeds = {spec.trial_seed(p, t) for p in spec.sweep_points() for t in range(5)}
        assert len(seeds) == 10


class TestRunExperiment:
    """Tests for running experiments."""

    def test_single_trial_table(self):
        """S = 1 yields one row per (algorithm, sweep point)."""
        table = run_experiment(_small_spec(trials=1))
        assert len(table.records) == 4
        assert len(table.aggregates) == 4
        assert [(r.algorithm, r.sweep_value) for r in table.records] == [
            ("rkld-wf-gaussian", 4.0), ("wf-l2", 4.0), ("rkld-wf-gaussian", 6.0), ("wf-l2", 6.0),
        ]
        assert all(a.trials == 1 for a in table.aggregates)
        assert table.check_consistency()

    def test_algorithms_share_instances(self):
        """All algorithms of a (sweep point, trial) pair share the seed."""
        table = run_experiment(_small_spec())
        by_pair = {}
        for record in table.records:
            by_pair.setdefault((record.sweep_value, record.trial), set()).add(record.seed)
        assert all(len(seeds) == 1 for seeds in by_pair.values())
        assert len({next(iter(s)) for s in by_pair.values()}) == len(by_pair)

    def test_deterministic(self):
        """Repeated runs agree on everything except wall time."""
        first = run_experiment(_small_spec())
        second = run_experiment(_small_spec())
        assert _without_wall_time(first) == _without_wall_time(second)

    def test_thread_count_irrelevant(self):
        """One thread and four threads produce the same table."""
        serial = run_experiment(_small_spec(trials=3), threads=1)
        parallel = run_experiment(_small_spec(trials=3), threads=4)
        assert _without_wall_time(serial) == _without_wall_time(parallel)
        assert [a.to_row() for a in serial.aggregates] == [a.to_row() for a in parallel.aggregates]

    def test_failed_trials_recorded(self):
        """An algorithm that raises is recorded as aborted at the error cap."""
        broken = SolverConfig(init=InitPolicy.provided(np.ones(3)), name="broken")
        table = run_experiment(_small_spec(algorithms=["rkld-wf-gaussian", broken], trials=1))
        rows = [r for r in table.records if r.algorithm == "broken"]
        assert len(rows) == 2
        assert all(r.aborted and not r.success for r in rows)
        assert all(r.rel_err == table.metadata["are_cap"] for r in rows)
        assert all(a.success_probability == 0.0 for a in table.aggregates
                   if a.algorithm == "broken")

    def test_measured_snr(self):
        """Target SNR experiments record the realized SNR."""
        spec = _small_spec(n=16, alphas=[8.0], snr_dbs=[20.0], trials=2,
                           algorithms=["rkld-wf-gaussian"])
        table = run_experiment(spec)
        assert all(abs(r.snr_db - 20.0) < 1.5 for r in table.records)

    def test_metadata(self):
        """Metadata names the schema, sweep and trial columns."""
        table = run_experiment(_small_spec(trials=1))
        meta = table.metadata
        assert meta["schema_version"] == 1
        assert meta["sweep_var"] == "alpha"
        assert meta["trial_columns"] == TRIAL_COLUMNS
        assert [a["name"] for a in meta["spec"]["algorithms"]] == ["rkld-wf-gaussian", "wf-l2"]

    def test_consistency_detects_tampering(self):
        """Edited aggregates no longer match the trial rows."""
        table = run_experiment(_small_spec(trials=1))
        table.aggregates[0].are += 1.0
        assert not table.check_consistency()
        table.aggregates = aggregate(table.records)
        assert table.check_consistency()


class TestCurves:
    """Tests for ARE-vs-iteration tables."""

    def test_off_by_default(self):
        """Experiments keep no curves unless asked to."""
        table = run_experiment(_small_spec(trials=1))
        assert table.curves == [] and table.curve_rows == []

    def test_curve_rows_recompute(self):
        """Curve rows are the capped per-trial traces averaged at every iteration."""
        table = run_experiment(_small_spec(curves=True))
        assert len(table.curves) == 2 * 2 * 2
        assert all(len(c.rel_errs) == 21 for c in table.curves)
        assert len(table.curve_rows) == 2 * 2 * 21
        cap = table.metadata["are_cap"]
        for row in table.curve_rows:
            members = [c for c in table.curves if c.algorithm == row.algorithm
                       and c.sweep_value == row.sweep_value]
            assert row.trials == len(members) == 2
            expected = math.fsum(c.rel_errs[row.iteration] for c in members) / len(members)
            assert row.are == expected
            assert all(0.0 <= c.rel_errs[row.iteration] <= cap for c in members)

    def test_curve_ends_at_final_error(self):
        """The last curve point equals the trial's recorded relative error."""
        table = run_experiment(_small_spec(curves=True))
        for record in table.records:
            curve = next(c for c in table.curves if c.algorithm == record.algorithm
                         and c.sweep_value == record.sweep_value and c.trial == record.trial)
            assert curve.rel_errs[-1] == pytest.approx(record.rel_err, rel=1e-9, abs=1e-15)


def _by_point(table, algorithm, field):
    return {row.sweep_value: getattr(row, field) for row in table.aggregates
            if row.algorithm == algorithm}


@pytest.mark.acceptance
class TestExperimentAcceptance:
    """Shipped experiments at desk scale; run with -m acceptance."""

    def test_sample_efficiency(self, config_dir):
        """RKLD-WF needs fewer samples than WF-l2 for noiseless Gaussian recovery."""
        spec = load_experiment(os.path.join(config_dir, "experiments", "success_vs_alpha.yaml"))
        assert spec.trials == 30
        table = run_experiment(spec, threads=4)
        rkld = _by_point(table, "rkld-wf-gaussian", "success_probability")
        wf = _by_point(table, "wf-l2", "success_probability")
        assert sorted(rkld) == [3.0, 4.0, 5.0, 6.0]
        for alpha in rkld:
            assert rkld[alpha] >= wf[alpha] - 0.15
        assert rkld[6.0] >= 0.9
        assert wf[3.0] <= 0.5

    def test_noise_and_outliers(self, config_dir):
        """Truncated RKLD solvers reach a small ARE and halve the median-TWF error."""
        spec = load_experiment(os.path.join(config_dir, "experiments",
                                            "robust_noise_outliers.yaml"))
        table = run_experiment(spec, threads=4)
        errors = {row.algorithm: row.are for row in table.aggregates}
        for name in ("rkld-mtwf", "rkld-gtwf"):
            assert errors[name] <= 3e-2
            assert errors[name] <= 0.5 * errors["median-twf"]

    def test_outlier_fraction(self, config_dir):
        """RKLD-GTWF tolerates 20% outliers and never trails median-TWF."""
        spec = load_experiment(os.path.join(config_dir, "experiments", "success_vs_rho.yaml"))
        table = run_experiment(spec, threads=4)
        gtwf = _by_point(table, "rkld-gtwf", "success_probability")
        median = _by_point(table, "median-twf", "success_probability")
        assert gtwf[0.2] >= 0.8
        for rho in (0.05, 0.1, 0.2):
            assert median[rho] <= gtwf[rho] + 0.15
