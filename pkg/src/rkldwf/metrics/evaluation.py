"""
Monte-Carlo evaluation metrics.

Sums go through ``math.fsum`` so that every aggregate is exactly independent of
record order.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..core.errors import ArgumentError

DEFAULT_SUCCESS_THRESHOLD = 1e-5

TRIAL_COLUMNS = [
    "algorithm", "sweep_var", "sweep_value", "trial", "seed",
    "dist", "rel_err", "iters", "success", "acc", "wall_ms",
]
AGGREGATE_COLUMNS = [
    "algorithm", "sweep_var", "sweep_value", "trials",
    "are", "success_probability", "success_ci_low", "success_ci_high", "acc", "mean_iterations",
]
CURVE_COLUMNS = ["algorithm", "sweep_var", "sweep_value", "iter", "trials", "are"]


@dataclass
class TrialRecord:
    """Outcome of one algorithm on one Monte-Carlo instance."""

    seed: int
    sweep_var: str
    sweep_value: float
    algorithm: str
    trial: int
    dist: float
    rel_err: float
    iterations: int
    success: bool
    acc: float
    wall_ms: float = 0.0
    converged: bool = False
    aborted: bool = False
    snr_db: Optional[float] = None

    def to_row(self) -> Dict[str, Any]:
        """Row of the trial CSV (TRIAL_COLUMNS)."""
        return {
            "algorithm": self.algorithm,
            "sweep_var": self.sweep_var,
            "sweep_value": self.sweep_value,
            "trial": self.trial,
            "seed": self.seed,
            "dist": self.dist,
            "rel_err": self.rel_err,
            "iters": self.iterations,
            "success": int(self.success),
            "acc": self.acc,
            "wall_ms": self.wall_ms,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = self.to_row()
        data.update({"converged": self.converged, "aborted": self.aborted, "snr_db": self.snr_db})
        return data


@dataclass
class AggregateRow:
    """Per (algorithm, sweep point) summary."""

    algorithm: str
    sweep_var: str
    sweep_value: float
    trials: int
    are: float
    success_probability: float
    acc: float
    mean_iterations: float
    success_ci_low: float = 0.0
    success_ci_high: float = 1.0

    def to_row(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "sweep_var": self.sweep_var,
            "sweep_value": self.sweep_value,
            "trials": self.trials,
            "are": self.are,
            "success_probability": self.success_probability,
            "success_ci_low": self.success_ci_low,
            "success_ci_high": self.success_ci_high,
            "acc": self.acc,
            "mean_iterations": self.mean_iterations,
        }


def _require(records: Sequence[TrialRecord], what: str) -> None:
    if len(records) == 0:
        raise ArgumentError(f"{what} needs at least one trial record")


def are(records: Sequence[TrialRecord]) -> float:
    """Average relative error: mean of dist / ||x|| over the trials."""
    _require(records, "ARE")
    return math.fsum(r.rel_err for r in records) / len(records)


def success_probability(records: Sequence[TrialRecord],
                        threshold: float = DEFAULT_SUCCESS_THRESHOLD,
                        relative: bool = False) -> float:
    """
    Fraction of trials with dist < threshold (strict).

    Args:
        records: trial records
        threshold: success threshold
        relative: compare rel_err instead of the absolute dist

    Returns:
        value in [0, 1]
    """
    _require(records, "Success probability")
    hits = sum(1 for r in records if (r.rel_err if relative else r.dist) < threshold)
    return hits / len(records)


def success_interval(records: Sequence[TrialRecord], threshold: float = DEFAULT_SUCCESS_THRESHOLD,
                     relative: bool = False, confidence: float = 0.95) -> Tuple[float, float]:
    """Clopper-Pearson interval for the success probability."""
    _require(records, "Success interval")
    hits = sum(1 for r in records if (r.rel_err if relative else r.dist) < threshold)
    ci = stats.binomtest(hits, len(records)).proportion_ci(confidence_level=confidence)
    return float(ci.low), float(ci.high)


def snr_db(y_clean, w) -> float:
    """20 log10 sqrt(var(y_clean) / var(w)) with population variances."""
    noise_var = float(np.var(np.asarray(w, dtype=np.float64)))
    if noise_var == 0.0:
        raise ArgumentError("SNR is undefined for zero noise variance")
    signal_var = float(np.var(np.asarray(y_clean, dtype=np.float64)))
    return 20.0 * math.log10(math.sqrt(signal_var / noise_var))


def correlation(x, z) -> float:
    """|<x, z/||z||>| / ||x||, which lies in [0, 1]."""
    x = np.asarray(x, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if x.shape != z.shape:
        raise ArgumentError(f"Shapes differ: {x.shape} vs {z.shape}")
    x_norm = float(np.linalg.norm(x))
    z_norm = float(np.linalg.norm(z))
    if z_norm == 0.0:
        raise ArgumentError("Correlation is undefined for a zero-norm reconstruction")
    if x_norm == 0.0:
        raise ArgumentError("Correlation is undefined for a zero-norm signal")
    return min(abs(np.vdot(x, z)) / (x_norm * z_norm), 1.0)


def acc(x, reconstructions: Iterable) -> float:
    """Average correlation coefficient of one signal over its reconstructions."""
    values = [correlation(x, z) for z in reconstructions]
    if not values:
        raise ArgumentError("ACC needs at least one reconstruction")
    return math.fsum(values) / len(values)


def acc_over_images(per_image: Sequence[float]) -> float:
    """Mean of per-image ACC values."""
    if len(per_image) == 0:
        raise ArgumentError("ACC over images needs at least one image")
    return math.fsum(per_image) / len(per_image)


def aggregate(records: Sequence[TrialRecord], threshold: float = DEFAULT_SUCCESS_THRESHOLD,
              relative: bool = False) -> List[AggregateRow]:
    """
    Aggregate trial records per (algorithm, sweep_var, sweep_value).

    Rows come out in order of first appearance of their group.
    """
    groups: Dict[Tuple[str, str, float], List[TrialRecord]] = {}
    for record in records:
        key = (record.algorithm, record.sweep_var, record.sweep_value)
        groups.setdefault(key, []).append(record)

    rows = []
    for (algorithm, sweep_var, sweep_value), members in groups.items():
        low, high = success_interval(members, threshold, relative)
        rows.append(AggregateRow(
            algorithm=algorithm,
            sweep_var=sweep_var,
            sweep_value=sweep_value,
            trials=len(members),
            are=are(members),
            success_probability=success_probability(members, threshold, relative),
            acc=math.fsum(r.acc for r in members) / len(members),
            mean_iterations=math.fsum(r.iterations for r in members) / len(members),
            success_ci_low=low,
            success_ci_high=high,
        ))
    return rows


@dataclass
class TrialCurve:
    """Relative error per iteration of one algorithm on one trial."""

    algorithm: str
    sweep_var: str
    sweep_value: float
    trial: int
    rel_errs: List[float]


@dataclass
class CurveRow:
    """ARE at one iteration of one (algorithm, sweep point)."""

    algorithm: str
    sweep_var: str
    sweep_value: float
    iteration: int
    trials: int
    are: float

    def to_row(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "sweep_var": self.sweep_var,
            "sweep_value": self.sweep_value,
            "iter": self.iteration,
            "trials": self.trials,
            "are": self.are,
        }


def error_curve(rel_errs: Sequence[Optional[float]], length: int, cap: float) -> List[float]:
    """
    Per-iteration relative errors capped at ``cap`` and padded to ``length``.

    Missing or non-finite entries count as the cap. A run that stopped early
    keeps its last error for the remaining iterations.
    """
    if length < 1:
        raise ArgumentError(f"Curve length must be positive, got {length}")
    curve = [cap if e is None or not math.isfinite(e) else min(e, cap) for e in rel_errs]
    curve = curve[:length]
    if not curve:
        return [cap] * length
    return curve + [curve[-1]] * (length - len(curve))


def aggregate_curves(curves: Sequence[TrialCurve]) -> List[CurveRow]:
    """
    Mean relative error per iteration over the trials of each (algorithm, sweep point).

    Curves of one group are padded with their last value to the longest member.
    """
    groups: Dict[Tuple[str, str, float], List[TrialCurve]] = {}
    for curve in curves:
        key = (curve.algorithm, curve.sweep_var, curve.sweep_value)
        groups.setdefault(key, []).append(curve)

    rows = []
    for (algorithm, sweep_var, sweep_value), members in groups.items():
        length = max(len(c.rel_errs) for c in members)
        if length == 0:
            continue
        padded = [c.rel_errs + [c.rel_errs[-1]] * (length - len(c.rel_errs))
                  for c in members if c.rel_errs]
        for k in range(length):
            rows.append(CurveRow(
                algorithm=algorithm,
                sweep_var=sweep_var,
                sweep_value=sweep_value,
                iteration=k,
                trials=len(padded),
                are=math.fsum(p[k] for p in padded) / len(padded),
            ))
    return rows
