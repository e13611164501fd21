"""
Loss values and Wirtinger gradients.

Every loss has the per-measurement form f(z) = sum_m phi(q_m, y_m) with
q = |Az|^2, so its Wirtinger gradient is

    df/dz_bar = A*[Az (.) phi'(q)]

where the Wirtinger derivative is df/dz_bar = (df/dRe z + i df/dIm z) / 2.
"""

from typing import Optional, Tuple

import numpy as np
from scipy import special

from ..core.errors import ArgumentError
from .kinds import LossEval, LossKind, LossName


def _check_inputs(y: np.ndarray, m: int) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (m,):
        raise ArgumentError(f"Expected {m} measurements, got shape {y.shape}")
    if np.any(y < 0):
        raise ArgumentError("Measurements must be nonnegative")
    return y


def _rkld_terms(q: np.ndarray, y: np.ndarray, lam: float) -> Tuple[np.ndarray, np.ndarray]:
    shifted_q = q + lam
    log_ratio = np.log(shifted_q) - np.log(y + lam)
    # divergence form: shifted by (y + lam) so that each term is >= 0 and zero at fit
    values = shifted_q * log_ratio - shifted_q + (y + lam)
    return values, log_ratio


def _intensity_terms(q: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    residual = q - y
    return 0.5 * residual ** 2, residual


def _poisson_terms(q: np.ndarray, y: np.ndarray, eps: float) -> Tuple[np.ndarray, np.ndarray]:
    guarded = q + eps
    values = special.xlogy(y, y) - special.xlogy(y, guarded) - (y - q)
    return values, 1.0 - y / guarded


def _reshaped_terms(q: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    amplitude = np.sqrt(q)
    target = np.sqrt(y)
    values = 0.5 * (amplitude - target) ** 2
    weights = np.zeros_like(q)
    nonzero = amplitude > 0
    weights[nonzero] = 0.5 * (1.0 - target[nonzero] / amplitude[nonzero])
    return values, weights


def loss_terms(kind: LossKind, q: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-measurement values phi(q_m, y_m) and derivatives phi'(q_m).

    Args:
        kind: loss descriptor
        q: synthesized intensities |Az|^2
        y: measured intensities

    Returns:
        (values, derivatives), both of length M and unnormalized
    """
    if kind.name is LossName.RKLD:
        return _rkld_terms(q, y, kind.lam)
    if kind.name is LossName.INTENSITY_L2:
        return _intensity_terms(q, y)
    if kind.name is LossName.POISSON:
        return _poisson_terms(q, y, kind.poisson_guard(y))
    if kind.name is LossName.RESHAPED_L2:
        return _reshaped_terms(q, y)
    raise ArgumentError(f"Unknown loss: {kind.name}")


def evaluate(kind: LossKind, z, op, y, normalize: bool = False,
             az: Optional[np.ndarray] = None) -> LossEval:
    """
    Loss value and Wirtinger gradient at ``z``.

    Args:
        kind: loss descriptor
        z: current estimate
        op: measurement operator (possibly a masked view)
        y: measurements
        normalize: divide value and gradient by M
        az: precomputed op.apply(z)

    Returns:
        LossEval
    """
    m = op.shape[0]
    y = _check_inputs(y, m)
    if az is None:
        az = op.apply(z)
    q = np.abs(az) ** 2
    values, derivatives = loss_terms(kind, q, y)
    value = float(np.sum(values))
    grad = op.adjoint_apply(az * derivatives)
    if normalize:
        value /= m
        grad = grad / m
    return LossEval(value=value, grad=grad, az=az)


def loss_value(kind: LossKind, z, op, y, normalize: bool = False,
               az: Optional[np.ndarray] = None) -> float:
    """Loss value only (one forward product, no adjoint)."""
    m = op.shape[0]
    y = _check_inputs(y, m)
    if az is None:
        az = op.apply(z)
    values, _ = loss_terms(kind, np.abs(az) ** 2, y)
    value = float(np.sum(values))
    return value / m if normalize else value


def _check_lambda(lam: float) -> None:
    if lam <= 0:
        raise ArgumentError(f"Regularizer lambda must be positive, got {lam}")


def rkld_value(z, op, y, lam: float) -> float:
    """
    Regularized RKLD in divergence form.

    sum (q+lam) log((q+lam)/(y+lam)) - sum (q+lam) + sum (y+lam); >= 0 and zero iff q = y.
    """
    _check_lambda(lam)
    y = _check_inputs(y, op.shape[0])
    values, _ = _rkld_terms(np.abs(op.apply(z)) ** 2, y, lam)
    return float(np.sum(values))


def rkld_grad(z, op, y, lam: float, normalize: bool = False) -> np.ndarray:
    """A*[Az (.) (log(|Az|^2 + lam) - log(y + lam))], optionally divided by M."""
    _check_lambda(lam)
    m = op.shape[0]
    y = _check_inputs(y, m)
    az = op.apply(z)
    log_ratio = np.log(np.abs(az) ** 2 + lam) - np.log(y + lam)
    grad = op.adjoint_apply(az * log_ratio)
    return grad / m if normalize else grad


def rkld_constrained_value(z, op, y) -> float:
    """
    Unregularized RKLD in its orthogonality form.

    Measurements with y_m = 0 act as the constraint a_m* z = 0: the value is
    +inf when any of them has |a_m* z|^2 > 0 and the remaining terms
    otherwise.
    """
    m = op.shape[0]
    y = _check_inputs(y, m)
    q = np.abs(op.apply(z)) ** 2
    zero = y == 0
    if np.any(q[zero] > 0):
        return float("inf")
    q_kept, y_kept = q[~zero], y[~zero]
    values = special.xlogy(q_kept, q_kept) - special.xlogy(q_kept, y_kept) - q_kept + y_kept
    return float(np.sum(values))


def baseline_eval(kind: LossKind, z, op, y) -> LossEval:
    """Baseline losses (IntensityL2, PoissonFkld, ReshapedL2), normalized by M."""
    if kind.name is LossName.RKLD:
        raise ArgumentError("baseline_eval expects a baseline loss; use rkld_value/rkld_grad")
    return evaluate(kind, z, op, y, normalize=True)
