"""
Gradient-descent driver.

One loop covers plain and truncated RKLD Wirtinger flow as well as the
baseline solvers: initialize, then per iteration rebuild the mask, evaluate the
masked gradient, pick a step and update z <- z - mu_k * s * grad.
"""

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.errors import ArgumentError
from ..core.linalg import as_complex_vector, relative_error
from ..core.rng import Rng
from ..init.spectral import SpectralEstimate, classical_weights, rkld_weights, spectral_estimate
from ..losses.divergence import evaluate, loss_terms, loss_value
from ..losses.kinds import LossEval
from ..models.generation import ProblemInstance
from ..models.operators import MeasurementOperator
from ..truncation.masks import apply_mask, build_mask, with_minimum_keep
from .config import InitName, SolverConfig, StepName

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 50


class AbortReason(Enum):
    """Why a run stopped early without converging."""

    NON_FINITE_LOSS = "non_finite_loss"
    NON_FINITE_GRADIENT = "non_finite_gradient"
    DIVERGED = "diverged"


@dataclass
class AbortRecord:
    """Diagnostic for an aborted run."""

    iteration: int
    reason: AbortReason
    index: Optional[int] = None
    message: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iteration": self.iteration,
            "reason": self.reason.value,
            "index": self.index,
            "message": self.message,
        }


@dataclass
class TraceRecord:
    """
    One iteration of a run.

    ``loss`` is the full (unmasked) loss divided by M, ``step`` the policy step
    mu_k before the 1/M and 1/||z0||^2 factors; the initial record has step 0.
    """

    iter: int
    loss: float
    rel_err: Optional[float]
    kept_count: int
    step: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iter": self.iter,
            "loss": self.loss,
            "rel_err": self.rel_err,
            "kept_count": self.kept_count,
            "step": self.step,
        }


@dataclass
class SolverResult:
    """Final iterate, stopping status and per-iteration trace."""

    z_final: np.ndarray
    iterations_used: int
    converged: bool
    trace: List[TraceRecord] = field(default_factory=list)
    abort: Optional[AbortRecord] = None
    init: Optional[SpectralEstimate] = None
    config_name: str = "custom"
    wall_ms: float = 0.0

    @property
    def aborted(self) -> bool:
        return self.abort is not None

    @property
    def final_loss(self) -> float:
        return self.trace[-1].loss if self.trace else float("nan")

    @property
    def final_rel_err(self) -> Optional[float]:
        return self.trace[-1].rel_err if self.trace else None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "config": self.config_name,
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "aborted": self.aborted,
            "final_loss": self.final_loss,
            "wall_ms": self.wall_ms,
        }
        if self.final_rel_err is not None:
            data["rel_err"] = self.final_rel_err
        if self.abort is not None:
            data["abort"] = self.abort.to_dict()
        if self.init is not None:
            data["init"] = self.init.to_dict()
        return data


def initialize(problem: ProblemInstance, config: SolverConfig):
    """
    Initial estimate for ``problem`` under ``config.init``.

    Returns:
        (z0, SpectralEstimate or None for a provided start)
    """
    op, y = problem.op, problem.y
    if config.init.name is InitName.PROVIDED:
        z0 = as_complex_vector(config.init.z0, "z0").copy()
        if z0.shape != (op.n,):
            raise ArgumentError(f"Provided z0 has shape {z0.shape}, expected ({op.n},)")
        return z0, None

    if config.init.name is InitName.CLASSICAL:
        weights = classical_weights(y)
    else:
        weights = rkld_weights(y, op)
    estimate = spectral_estimate(
        weights, op, y,
        rng=Rng(problem.meta.seed).spawn("init"),
        scale=config.init_scale,
        max_iters=config.eig_max_iters,
        tol=config.eig_tol,
    )
    if estimate.degenerate:
        logger.warning("Degenerate spectral initialization for %s", config.name)
    return estimate.z0, estimate


def _step_factor(config: SolverConfig, m: int, z0: np.ndarray) -> float:
    factor = 1.0
    if config.scale_per_measurement:
        factor /= m
    if config.scale_by_init_norm:
        norm_sq = float(np.vdot(z0, z0).real)
        if norm_sq > 0:
            factor /= norm_sq
    return factor


def _first_non_finite(values: np.ndarray) -> Optional[int]:
    bad = np.flatnonzero(~np.isfinite(values))
    return int(bad[0]) if bad.size else None


def _backtrack(config: SolverConfig, z: np.ndarray, op: MeasurementOperator, y: np.ndarray,
               current: LossEval, factor: float) -> float:
    """Armijo search: accept mu once f(z - mu s g) <= f(z) - 2 c mu s ||g||^2."""
    policy = config.step
    mu = policy.mu0
    decrease = 2.0 * policy.c * current.grad_norm ** 2
    for _ in range(policy.max_shrinks):
        trial = loss_value(config.loss, z - mu * factor * current.grad, op, y)
        if np.isfinite(trial) and trial <= current.value - mu * factor * decrease:
            return mu
        mu *= policy.beta
    return mu


def run(problem: ProblemInstance, config: SolverConfig) -> SolverResult:
    """
    Minimize ``config.loss`` from the configured initialization.

    Args:
        problem: operator, measurements and optional ground truth
        config: solver configuration

    Returns:
        SolverResult; non-finite values or divergence end the run with an AbortRecord
    """
    started = time.perf_counter()
    op, y = problem.op, problem.y
    m = op.m
    x_true = problem.x_true

    def rel_err(z: np.ndarray) -> Optional[float]:
        return relative_error(x_true, z) if x_true is not None else None

    z, init = initialize(problem, config)
    factor = _step_factor(config, m, z)

    az = op.apply(z)
    initial_loss = loss_value(config.loss, z, op, y, normalize=True, az=az)
    trace = [TraceRecord(0, initial_loss, rel_err(z), m, 0.0)]
    logger.info(
        "Solving with %s: M=%d N=%d K=%d", config.name, m, op.n, config.max_iters,
    )

    converged = False
    abort: Optional[AbortRecord] = None
    iterations = 0
    for k in range(config.max_iters):
        mask = build_mask(config.truncation, z, op, y, az=az)
        if mask is None:
            op_k, y_k, az_k, kept = op, y, az, m
        else:
            mask = with_minimum_keep(mask)
            op_k, y_k = apply_mask(op, y, mask)
            az_k = az * mask.weights
            kept = mask.kept_count

        current = evaluate(config.loss, z, op_k, y_k, az=az_k)
        if not np.isfinite(current.value):
            terms, _ = loss_terms(config.loss, np.abs(az_k) ** 2, y_k)
            abort = AbortRecord(k, AbortReason.NON_FINITE_LOSS, _first_non_finite(terms),
                                "loss is not finite")
            break
        if not np.all(np.isfinite(current.grad)):
            abort = AbortRecord(k, AbortReason.NON_FINITE_GRADIENT,
                                _first_non_finite(current.grad), "gradient is not finite")
            break

        if config.step.name is StepName.BACKTRACKING:
            mu = _backtrack(config, z, op_k, y_k, current, factor)
        else:
            mu = config.step.scheduled(k)

        z_next = z - (mu * factor) * current.grad
        az_next = op.apply(z_next)
        loss = loss_value(config.loss, z_next, op, y, normalize=True, az=az_next)
        if not np.isfinite(loss):
            terms, _ = loss_terms(config.loss, np.abs(az_next) ** 2, y)
            abort = AbortRecord(k + 1, AbortReason.NON_FINITE_LOSS, _first_non_finite(terms),
                                "loss is not finite after the update")
            break
        if initial_loss > 0 and loss > config.divergence_factor * initial_loss:
            abort = AbortRecord(k + 1, AbortReason.DIVERGED, None,
                                f"loss {loss:.6g} exceeds {config.divergence_factor:g} x initial")
            break

        delta = float(np.linalg.norm(z_next - z))
        z, az = z_next, az_next
        iterations = k + 1
        trace.append(TraceRecord(iterations, loss, rel_err(z), kept, mu))

        if iterations % PROGRESS_EVERY == 0:
            logger.debug("iter=%d loss=%.6g kept=%d step=%.4g", iterations, loss, kept, mu)
        if delta < config.stop_tol or delta == 0.0:
            converged = True
            break

    if abort is not None:
        logger.warning(
            "Run %s aborted at iteration %d: %s", config.name, abort.iteration, abort.reason.value,
        )
    wall_ms = (time.perf_counter() - started) * 1000.0
    logger.info(
        "Finished %s: iterations=%d converged=%s loss=%.6g",
        config.name, iterations, converged, trace[-1].loss,
    )
    return SolverResult(
        z_final=z,
        iterations_used=iterations,
        converged=converged,
        trace=trace,
        abort=abort,
        init=init,
        config_name=config.name,
        wall_ms=wall_ms,
    )
