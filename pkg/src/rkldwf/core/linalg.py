"""
Complex linear-algebra primitives: phase-invariant distance and the
leading-eigenvector solver used by spectral initialization.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ArgumentError
from .rng import Rng

logger = logging.getLogger(__name__)

DEFAULT_EIG_MAX_ITERS = 2000
DEFAULT_EIG_TOL = 1e-9

Matvec = Callable[[np.ndarray], np.ndarray]


def as_complex_vector(v, name: str = "vector") -> np.ndarray:
    """Return ``v`` as a 1-D complex128 array, rejecting non-finite entries."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise ArgumentError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} has non-finite entries")
    return arr


def _check_pair(x: np.ndarray, z: np.ndarray) -> None:
    if x.shape != z.shape:
        raise ArgumentError(f"Length mismatch: {x.shape[0]} vs {z.shape[0]}")


def optimal_phase(x, z) -> complex:
    """Unit scalar e^{i phi} minimizing ||x e^{i phi} - z||."""
    inner = np.vdot(x, z)
    magnitude = abs(inner)
    if magnitude == 0.0:
        return 1.0 + 0.0j
    return complex(inner / magnitude)


def align_phase(x, z) -> np.ndarray:
    """Rotate ``z`` by a global phase so that it best matches ``x``."""
    x = np.asarray(x, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    _check_pair(x, z)
    return z * np.conj(optimal_phase(x, z))


def dist_up_to_phase(x, z) -> float:
    """
    Euclidean distance between ``x`` and ``z`` modulo a global phase.

    The optimal phase aligns <x, z> with the positive real axis. The
    distance is then evaluated directly rather than through
    sqrt(|x|^2 + |z|^2 - 2|<x, z>|), which loses half the digits when z is near x.
    """
    x = np.asarray(x, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    _check_pair(x, z)
    return float(np.linalg.norm(x * optimal_phase(x, z) - z))


def relative_error(x, z) -> float:
    """dist_up_to_phase(x, z) / ||x||."""
    x = np.asarray(x, dtype=np.complex128)
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        raise ArgumentError("Relative error is undefined for a zero ground truth")
    return dist_up_to_phase(x, z) / norm


@dataclass
class EigenResult:
    """Leading eigenpair returned by :func:`leading_eigvec`."""

    vector: np.ndarray
    eigenvalue: float
    converged: bool
    iterations: int
    degenerate: bool = False

    def to_dict(self):
        return {
            "eigenvalue": self.eigenvalue,
            "converged": self.converged,
            "iterations": self.iterations,
            "degenerate": self.degenerate,
        }


def _power_iteration(matvec: Matvec, start: np.ndarray, max_iters: int, tol: float,
                     shift: float = 0.0) -> EigenResult:
    v = start / np.linalg.norm(start)
    eigenvalue = 0.0
    for iteration in range(1, max_iters + 1):
        w = matvec(v) - shift * v
        w_norm = np.linalg.norm(w)
        if w_norm == 0.0:
            return EigenResult(v, shift, converged=False, iterations=iteration, degenerate=True)
        eigenvalue = float(np.real(np.vdot(v, w)))
        residual = np.linalg.norm(w - eigenvalue * v)
        if residual <= tol * abs(eigenvalue):
            return EigenResult(v, eigenvalue + shift, converged=True, iterations=iteration)
        v = w / w_norm
    return EigenResult(v, eigenvalue + shift, converged=False, iterations=max_iters)


def leading_eigvec(matvec: Matvec, n: int, max_iters: int = DEFAULT_EIG_MAX_ITERS,
                   tol: float = DEFAULT_EIG_TOL, rng: Optional[Rng] = None) -> EigenResult:
    """
    Eigenvector of the largest (algebraic) eigenvalue of a Hermitian operator.

    Power iteration from a random unit start. When the dominant-magnitude
    eigenvalue is negative the operator is indefinite, so a second pass runs on
    the operator shifted by that eigenvalue, whose top eigenvector is the one sought.

    Args:
        matvec: callback applying the Hermitian operator to a length-n vector
        n: dimension
        max_iters: iteration cap per pass
        tol: stop once ||Mv - lambda v|| <= tol * |lambda|
        rng: source of the random start vector

    Returns:
        EigenResult; ``converged`` is False when ``max_iters`` ran out and
        ``degenerate`` is True when the operator annihilated the iterate.
    """
    if n < 1:
        raise ArgumentError(f"Dimension must be positive, got {n}")
    if tol <= 0:
        raise ArgumentError(f"Tolerance must be positive, got {tol}")
    rng = rng or Rng(0)

    first = _power_iteration(matvec, rng.complex_normal(n), max_iters, tol)
    if first.degenerate or first.eigenvalue >= 0.0:
        result = first
    else:
        shift = first.eigenvalue
        second = _power_iteration(matvec, rng.complex_normal(n), max_iters, tol, shift=shift)
        second.iterations += first.iterations
        result = second

    if result.degenerate:
        logger.warning("Eigensolver hit the null space of the operator (n=%d)", n)
    elif not result.converged:
        logger.warning(
            "Power iteration did not converge in %d iterations (n=%d, eigenvalue=%.6g)",
            max_iters, n, result.eigenvalue,
        )
    return result
