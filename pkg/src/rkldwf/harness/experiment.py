"""
Seeded Monte-Carlo experiments.

An experiment sweeps one axis (oversampling factor, pattern count, noise level,
outlier magnitude, outlier fraction or target SNR) and runs every algorithm S
times per sweep point. Each (sweep point, trial) pair draws its own operator
and corruption from a seed derived from (base_seed, sweep variable, sweep
value, trial), and all algorithms of that pair see the same instance. Trials
run on a thread pool; results are keyed by (sweep point, trial) so the table
does not depend on scheduling.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.errors import ArgumentError, ConfigError, PhaseRetrievalError
from ..core.linalg import dist_up_to_phase
from ..core.rng import Rng, derive_seed
from ..metrics.evaluation import (
    DEFAULT_SUCCESS_THRESHOLD,
    TRIAL_COLUMNS,
    AggregateRow,
    CurveRow,
    TrialCurve,
    TrialRecord,
    aggregate,
    aggregate_curves,
    correlation,
    error_curve,
    snr_db,
)
from ..models.generation import CorruptionSpec, ModelKind, ProblemInstance, generate_problem
from ..solver.config import SolverConfig, preset
from ..solver.runner import run

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_ARE_CAP = 10.0
SWEEP_AXES = ("alpha", "l_patterns", "sigma", "theta", "rho", "snr_db")


class SignalKind(Enum):
    """Ground-truth signal models."""

    COMPLEX_GAUSSIAN = "complex_gaussian"
    REAL_GAUSSIAN = "real_gaussian"


def signal_draw(kind: SignalKind, n: int, rng: Rng) -> np.ndarray:
    """
    Draw a ground-truth signal.

    ComplexGaussian has real and imaginary parts i.i.d. N(0, 1); RealGaussian is
    N(0, I) with a zero imaginary part.
    """
    if n < 1:
        raise ArgumentError(f"Signal length must be positive, got {n}")
    if kind is SignalKind.COMPLEX_GAUSSIAN:
        return rng.normal(n) + 1j * rng.normal(n)
    return rng.normal(n).astype(np.complex128)


@dataclass(frozen=True)
class SweepPoint:
    """Parameters of one sweep point."""

    index: int
    value: float
    alpha: float
    l_patterns: int
    sigma: float
    theta: float
    rho: float
    snr_db: Optional[float]


@dataclass
class ExperimentSpec:
    """
    Monte-Carlo experiment definition.

    Attributes:
        algorithms: preset names or inline solver configurations
        alphas: oversampling factors (Gaussian model)
        l_patterns: pattern counts (CDP model)
        sigmas, thetas, rhos: corruption grids
        snr_dbs: target SNRs; when given they set the noise level and replace sigmas
        trials: S, Monte-Carlo trials per sweep point
        max_iters, stop_tol: overrides applied to every algorithm
        are_cap: relative errors above this (or non-finite) are recorded as the cap
        curves: keep per-iteration relative errors for ARE-vs-iteration tables
    """

    algorithms: List[Union[str, SolverConfig]]
    name: str = "experiment"
    model: ModelKind = ModelKind.GAUSSIAN
    n: int = 64
    alphas: List[float] = field(default_factory=lambda: [6.0])
    l_patterns: List[int] = field(default_factory=lambda: [8])
    signal: SignalKind = SignalKind.COMPLEX_GAUSSIAN
    sigmas: List[float] = field(default_factory=lambda: [0.0])
    thetas: List[float] = field(default_factory=lambda: [0.0])
    rhos: List[float] = field(default_factory=lambda: [0.0])
    snr_dbs: Optional[List[float]] = None
    signed_outliers: bool = False
    trials: int = 20
    base_seed: int = 0
    max_iters: Optional[int] = None
    stop_tol: Optional[float] = None
    success_threshold: float = DEFAULT_SUCCESS_THRESHOLD
    relative_success: bool = False
    fresh_signal_per_trial: bool = False
    are_cap: float = DEFAULT_ARE_CAP
    threads: int = 1
    curves: bool = False

    def axis_values(self) -> Dict[str, List[Any]]:
        values: Dict[str, List[Any]] = {
            "sigma": list(self.sigmas),
            "theta": list(self.thetas),
            "rho": list(self.rhos),
        }
        if self.model is ModelKind.GAUSSIAN:
            values["alpha"] = list(self.alphas)
        else:
            values["l_patterns"] = list(self.l_patterns)
        if self.snr_dbs is not None:
            values["snr_db"] = list(self.snr_dbs)
        return values

    def validate(self) -> None:
        """Raise ConfigError when the experiment cannot be run."""
        if self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}", key="model.n")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}", key="experiment.trials")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}", key="experiment.threads")
        if not self.algorithms:
            raise ConfigError("At least one algorithm is required", key="algorithms")
        if not self.are_cap > 0:
            raise ConfigError("are_cap must be positive", key="experiment.are_cap")
        swept = []
        for axis, values in self.axis_values().items():
            if not values:
                raise ConfigError(f"Sweep list '{axis}' is empty", key=axis)
            if len(values) > 1:
                swept.append(axis)
        if len(swept) > 1:
            raise ConfigError(f"Only one axis may be swept, got {', '.join(sorted(swept))}",
                              key=swept[0])
        for alpha in self.alphas:
            if alpha <= 0:
                raise ConfigError(f"alpha must be positive, got {alpha}", key="model.alphas")
        for count in self.l_patterns:
            if int(count) < 1:
                raise ConfigError(f"l_patterns must be >= 1, got {count}", key="model.l_patterns")
        for sigma in self.sigmas:
            if sigma < 0:
                raise ConfigError(f"sigma must be >= 0, got {sigma}", key="corruption.sigmas")
        for theta in self.thetas:
            if theta < 0:
                raise ConfigError(f"theta must be >= 0, got {theta}", key="corruption.thetas")
        for rho in self.rhos:
            if not 0.0 <= rho < 1.0:
                raise ConfigError(f"rho must lie in [0, 1), got {rho}", key="corruption.rhos")
        self.solver_configs()

    @property
    def sweep_var(self) -> str:
        for axis, values in self.axis_values().items():
            if len(values) > 1:
                return axis
        if self.snr_dbs is not None:
            return "snr_db"
        return "alpha" if self.model is ModelKind.GAUSSIAN else "l_patterns"

    def sweep_points(self) -> List[SweepPoint]:
        """Sweep points in the order of the swept list."""
        values = self.axis_values()
        axis = self.sweep_var
        fixed = {name: vals[0] for name, vals in values.items()}
        points = []
        for index, value in enumerate(values[axis]):
            params = dict(fixed)
            params[axis] = value
            points.append(SweepPoint(
                index=index,
                value=float(value),
                alpha=float(params.get("alpha", self.alphas[0])),
                l_patterns=int(params.get("l_patterns", self.l_patterns[0])),
                sigma=float(params["sigma"]),
                theta=float(params["theta"]),
                rho=float(params["rho"]),
                snr_db=float(params["snr_db"]) if "snr_db" in params else None,
            ))
        return points

    def solver_configs(self) -> List[SolverConfig]:
        """Algorithms as solver configurations with the experiment-wide overrides applied."""
        overrides: Dict[str, Any] = {}
        if self.max_iters is not None:
            overrides["max_iters"] = self.max_iters
        if self.stop_tol is not None:
            overrides["stop_tol"] = self.stop_tol
        configs = []
        for entry in self.algorithms:
            config = preset(entry) if isinstance(entry, str) else entry
            configs.append(config.with_overrides(**overrides) if overrides else config)
        names = [c.name for c in configs]
        if len(set(names)) != len(names):
            raise ConfigError(f"Algorithm names must be unique, got {names}", key="algorithms")
        return configs

    def trial_seed(self, point: SweepPoint, trial: int) -> int:
        return derive_seed(self.base_seed, self.sweep_var, point.value, trial)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "model": self.model.value,
            "n": self.n,
            "alphas": list(self.alphas),
            "l_patterns": list(self.l_patterns),
            "signal": self.signal.value,
            "sigmas": list(self.sigmas),
            "thetas": list(self.thetas),
            "rhos": list(self.rhos),
            "snr_dbs": None if self.snr_dbs is None else list(self.snr_dbs),
            "signed_outliers": self.signed_outliers,
            "algorithms": [c.to_dict() for c in self.solver_configs()],
            "trials": self.trials,
            "base_seed": self.base_seed,
            "max_iters": self.max_iters,
            "stop_tol": self.stop_tol,
            "success_threshold": self.success_threshold,
            "relative_success": self.relative_success,
            "fresh_signal_per_trial": self.fresh_signal_per_trial,
            "curves": self.curves,
        }


@dataclass
class ResultTable:
    """Trial rows, aggregates and run metadata of one experiment."""

    records: List[TrialRecord]
    aggregates: List[AggregateRow]
    metadata: Dict[str, Any] = field(default_factory=dict)
    curves: List[TrialCurve] = field(default_factory=list)
    curve_rows: List[CurveRow] = field(default_factory=list)

    def check_consistency(self) -> bool:
        """True when the aggregates equal a recomputation from the trial rows."""
        recomputed = aggregate(
            self.records,
            self.metadata.get("success_threshold", DEFAULT_SUCCESS_THRESHOLD),
            self.metadata.get("relative_success", False),
        )
        return [r.to_row() for r in recomputed] == [r.to_row() for r in self.aggregates]


def _capped(x: np.ndarray, z: np.ndarray, cap: float) -> Tuple[float, float]:
    x_norm = float(np.linalg.norm(x))
    dist = dist_up_to_phase(x, z) if np.all(np.isfinite(z)) else float("nan")
    rel = dist / x_norm
    if not math.isfinite(rel) or rel > cap:
        return cap * x_norm, cap
    return dist, rel


def _measured_snr(problem: ProblemInstance) -> Optional[float]:
    if problem.noise is None or problem.y_clean is None or float(np.var(problem.noise)) == 0.0:
        return None
    return snr_db(problem.y_clean, problem.noise)


def _run_trial(
    spec: ExperimentSpec,
    configs: Sequence[SolverConfig],
    point: SweepPoint,
    trial: int,
    x_fixed: Optional[np.ndarray],
) -> Tuple[List[TrialRecord], List[TrialCurve]]:
    seed = spec.trial_seed(point, trial)
    if x_fixed is None:
        x = signal_draw(spec.signal, spec.n, Rng(seed).spawn("signal"))
    else:
        x = x_fixed
    corruption = CorruptionSpec(
        sigma=point.sigma, theta=point.theta, rho=point.rho,
        signed_outliers=spec.signed_outliers,
    )
    problem = generate_problem(
        spec.model, x, Rng(seed), alpha=point.alpha, l_patterns=point.l_patterns,
        corruption=corruption, snr_db=point.snr_db, seed=seed,
    )
    measured_snr = _measured_snr(problem)

    records = []
    curves = []
    for config in configs:
        base = dict(seed=seed, sweep_var=spec.sweep_var, sweep_value=point.value,
                    algorithm=config.name, trial=trial, snr_db=measured_snr)
        length = config.max_iters + 1
        try:
            result = run(problem, config)
        except PhaseRetrievalError as exc:
            logger.warning("Trial %d of %s at %s=%g failed: %s",
                           trial, config.name, spec.sweep_var, point.value, exc)
            records.append(TrialRecord(
                dist=spec.are_cap * float(np.linalg.norm(x)), rel_err=spec.are_cap,
                iterations=0, success=False, acc=0.0, aborted=True, **base,
            ))
            if spec.curves:
                curves.append(TrialCurve(config.name, spec.sweep_var, point.value, trial,
                                         [spec.are_cap] * length))
            continue

        dist, rel = _capped(x, result.z_final, spec.are_cap)
        criterion = rel if spec.relative_success else dist
        z_ok = np.all(np.isfinite(result.z_final)) and np.linalg.norm(result.z_final) > 0
        records.append(TrialRecord(
            dist=dist,
            rel_err=rel,
            iterations=result.iterations_used,
            success=criterion < spec.success_threshold,
            acc=correlation(x, result.z_final) if z_ok else 0.0,
            wall_ms=result.wall_ms,
            converged=result.converged,
            aborted=result.aborted,
            **base,
        ))
        if spec.curves:
            errors = [record.rel_err for record in result.trace]
            curves.append(TrialCurve(config.name, spec.sweep_var, point.value, trial,
                                     error_curve(errors, length, spec.are_cap)))
    return records, curves


def run_experiment(spec: ExperimentSpec, threads: Optional[int] = None) -> ResultTable:
    """
    Run every (sweep point, trial, algorithm) combination of ``spec``.

    Args:
        spec: experiment definition
        threads: worker count; defaults to ``spec.threads``

    Returns:
        ResultTable ordered by sweep point, trial and algorithm
    """
    spec.validate()
    workers = threads or spec.threads
    configs = spec.solver_configs()
    points = spec.sweep_points()
    x_fixed = None
    if not spec.fresh_signal_per_trial:
        x_fixed = signal_draw(spec.signal, spec.n, Rng(spec.base_seed).spawn("signal"))

    tasks = [(point, trial) for point in points for trial in range(spec.trials)]
    logger.info(
        "Experiment %s: %d sweep points x %d trials x %d algorithms on %d threads",
        spec.name, len(points), spec.trials, len(configs), workers,
    )

    def task(item: Tuple[SweepPoint, int]) -> Tuple[List[TrialRecord], List[TrialCurve]]:
        point, trial = item
        return _run_trial(spec, configs, point, trial, x_fixed)

    results: Dict[Tuple[int, int], Tuple[List[TrialRecord], List[TrialCurve]]] = {}
    if workers == 1:
        for item in tasks:
            results[(item[0].index, item[1])] = task(item)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for item, outcome in zip(tasks, pool.map(task, tasks)):
                results[(item[0].index, item[1])] = outcome

    records = [r for key in sorted(results) for r in results[key][0]]
    curves = [c for key in sorted(results) for c in results[key][1]]
    aggregates = aggregate(records, spec.success_threshold, spec.relative_success)
    failed = sum(1 for r in records if r.aborted)
    if failed:
        logger.warning("%d of %d runs aborted in %s", failed, len(records), spec.name)
    metadata = {
        "schema_version": SCHEMA_VERSION,
        "experiment": spec.name,
        "sweep_var": spec.sweep_var,
        "are_cap": spec.are_cap,
        "success_threshold": spec.success_threshold,
        "relative_success": spec.relative_success,
        "trial_columns": list(TRIAL_COLUMNS),
        "curves": spec.curves,
        "spec": spec.to_dict(),
    }
    logger.info("Experiment %s finished: %d trial rows", spec.name, len(records))
    return ResultTable(records=records, aggregates=aggregates, metadata=metadata,
                       curves=curves, curve_rows=aggregate_curves(curves))
