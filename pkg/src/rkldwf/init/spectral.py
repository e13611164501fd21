"""
Spectral initialization.

The initial estimate is the leading eigenvector of D = sum_m h_m a_m a_m*,
applied matrix-free as A* diag(h) A, scaled by a norm estimate of the signal.
Two weightings are provided: the classical scatter matrix (h = y / M) and the
minimum-distortion weights for the reverse KL divergence.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from ..core.errors import ArgumentError
from ..core.linalg import DEFAULT_EIG_MAX_ITERS, DEFAULT_EIG_TOL, leading_eigvec
from ..core.rng import Rng
from ..models.operators import MeasurementOperator

logger = logging.getLogger(__name__)

ZERO_MEASUREMENT_FLOOR = 1e-12


class WeightKind(Enum):
    """Sample processing functions."""

    CLASSICAL = "classical"
    RKLD = "rkld"


@dataclass
class SpectralWeights:
    """Per-measurement weights h of the spectral matrix."""

    h: np.ndarray
    kind: WeightKind

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=np.float64)
        if not np.all(np.isfinite(self.h)):
            raise ArgumentError("Spectral weights must be finite")

    @property
    def is_zero(self) -> bool:
        return not np.any(self.h)


@dataclass
class SpectralEstimate:
    """Initial estimate z0 with eigensolver diagnostics."""

    z0: np.ndarray
    eigenvalue: float
    scale: float
    converged: bool
    degenerate: bool
    iterations: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eigenvalue": self.eigenvalue,
            "scale": self.scale,
            "converged": self.converged,
            "degenerate": self.degenerate,
            "iterations": self.iterations,
        }


def _check_measurements(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ArgumentError(f"Measurements must be a vector, got shape {y.shape}")
    if np.any(y < 0):
        raise ArgumentError("Measurements must be nonnegative")
    return y


def classical_weights(y) -> SpectralWeights:
    """h_m = y_m / M."""
    y = _check_measurements(y)
    return SpectralWeights(h=y / y.shape[0], kind=WeightKind.CLASSICAL)


def rkld_weights(y, op: MeasurementOperator) -> SpectralWeights:
    """
    Minimum-distortion weights for the reverse KL divergence.

    h_m = log((y_m / ||y||_1) / (||a_m||^2 / sum_i ||a_i||^2)). Zero measurements
    are floored at 1e-12 * mean(y) before the log, so they receive a large
    negative weight instead of -inf.

    Args:
        y: measurements, not all zero
        op: measurement operator supplying the row norms

    Returns:
        SpectralWeights of kind RKLD
    """
    y = _check_measurements(y)
    if y.shape[0] != op.m:
        raise ArgumentError(f"Expected {op.m} measurements, got {y.shape[0]}")
    total = float(np.sum(y))
    if total <= 0:
        raise ArgumentError("RKLD weights need at least one positive measurement")

    floored = np.maximum(y, ZERO_MEASUREMENT_FLOOR * total / y.shape[0])
    row_norms = op.row_norms_sq()
    h = np.log(floored / total) - np.log(row_norms / np.sum(row_norms))
    return SpectralWeights(h=h, kind=WeightKind.RKLD)


def norm_estimate(y, op: MeasurementOperator) -> float:
    """sqrt(N * sum(y) / sum_m ||a_m||^2), i.e. sqrt(mean y) for unit-variance Gaussian rows."""
    y = np.asarray(y, dtype=np.float64)
    return float(np.sqrt(op.n * np.sum(y) / np.sum(op.row_norms_sq())))


def spectral_estimate(weights: SpectralWeights, op: MeasurementOperator, y,
                      rng: Optional[Rng] = None, scale: Optional[float] = None,
                      max_iters: int = DEFAULT_EIG_MAX_ITERS,
                      tol: float = DEFAULT_EIG_TOL) -> SpectralEstimate:
    """
    Leading eigenvector of A* diag(h) A scaled to the estimated signal norm.

    Args:
        weights: spectral weights of length M
        op: measurement operator
        y: measurements (for the norm estimate)
        rng: source of the power-iteration start vector
        scale: overrides the norm estimate when given
        max_iters: eigensolver iteration cap
        tol: eigensolver residual tolerance

    Returns:
        SpectralEstimate; ``degenerate`` is set for all-zero weights
    """
    if weights.h.shape != (op.m,):
        raise ArgumentError(f"Expected {op.m} weights, got shape {weights.h.shape}")
    h = weights.h
    norm = norm_estimate(y, op) if scale is None else float(scale)

    if weights.is_zero:
        logger.warning("Spectral weights are all zero; initial estimate is degenerate")
        return SpectralEstimate(
            z0=np.zeros(op.n, dtype=np.complex128), eigenvalue=0.0, scale=norm,
            converged=False, degenerate=True, iterations=0,
        )

    def matvec(v: np.ndarray) -> np.ndarray:
        return op.adjoint_apply(h * op.apply(v))

    eig = leading_eigvec(matvec, op.n, max_iters=max_iters, tol=tol, rng=rng)
    logger.debug(
        "Spectral init (%s): eigenvalue=%.6g iterations=%d converged=%s",
        weights.kind.value, eig.eigenvalue, eig.iterations, eig.converged,
    )
    return SpectralEstimate(
        z0=norm * eig.vector,
        eigenvalue=eig.eigenvalue,
        scale=norm,
        converged=eig.converged,
        degenerate=eig.degenerate,
        iterations=eig.iterations,
    )
