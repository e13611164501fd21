"""
Sampling operators, forward intensities and the corruption model

    y = |Ax|^2 + eta + w

with uniform bounded noise w and sparse uniform outliers eta, both scaled by ||x||^2.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from ..core.errors import ArgumentError
from ..core.rng import Rng
from .operators import CdpOperator, DenseOperator, MeasurementOperator

logger = logging.getLogger(__name__)

# octanary pattern: b1 uniform on {1, -1, i, -i}, b2 in {sqrt(2)/2, sqrt(3)} w.p. {4/5, 1/5}
OCTANARY_PHASES = np.array([1.0, -1.0, 1.0j, -1.0j], dtype=np.complex128)
OCTANARY_LOW = np.sqrt(2.0) / 2.0
OCTANARY_HIGH = np.sqrt(3.0)
OCTANARY_LOW_PROB = 0.8


class ModelKind(Enum):
    """Measurement models."""

    GAUSSIAN = "gaussian"
    CDP = "cdp"


@dataclass(frozen=True)
class CorruptionSpec:
    """Noise and outlier parameters, all relative to ||x||^2."""

    sigma: float = 0.0
    theta: float = 0.0
    rho: float = 0.0
    signed_outliers: bool = False

    def __post_init__(self):
        if self.sigma < 0:
            raise ArgumentError(f"sigma must be >= 0, got {self.sigma}")
        if self.theta < 0:
            raise ArgumentError(f"theta must be >= 0, got {self.theta}")
        if not 0.0 <= self.rho < 1.0:
            raise ArgumentError(f"rho must lie in [0, 1), got {self.rho}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma": self.sigma,
            "theta": self.theta,
            "rho": self.rho,
            "signed_outliers": self.signed_outliers,
        }


@dataclass
class CorruptionResult:
    """Corrupted intensities plus the injected components."""

    y: np.ndarray
    outlier_support: np.ndarray
    noise: np.ndarray
    outliers: np.ndarray


@dataclass
class ProblemMeta:
    """Generation metadata carried by a problem instance."""

    model: str
    seed: int = 0
    sigma: float = 0.0
    theta: float = 0.0
    rho: float = 0.0
    signed_outliers: bool = False
    snr_db: Optional[float] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "model": self.model,
            "seed": self.seed,
            "sigma": self.sigma,
            "theta": self.theta,
            "rho": self.rho,
            "signed_outliers": self.signed_outliers,
            "snr_db": self.snr_db,
        }
        data.update(self.extra)
        return data


@dataclass
class ProblemInstance:
    """Operator, nonnegative measurements and optional ground truth."""

    op: MeasurementOperator
    y: np.ndarray
    x_true: Optional[np.ndarray] = None
    meta: ProblemMeta = field(default_factory=lambda: ProblemMeta(model="external"))
    y_clean: Optional[np.ndarray] = None
    noise: Optional[np.ndarray] = None
    outlier_support: Optional[np.ndarray] = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.float64)
        m, n = self.op.shape
        if self.y.shape != (m,):
            raise ArgumentError(
                f"Measurement vector has shape {self.y.shape}, operator has {m} rows"
            )
        if np.any(self.y < 0) or not np.all(np.isfinite(self.y)):
            raise ArgumentError("Measurements must be finite and nonnegative")
        if self.x_true is not None:
            self.x_true = np.asarray(self.x_true, dtype=np.complex128)
            if self.x_true.shape != (n,):
                raise ArgumentError(
                    f"Ground truth has shape {self.x_true.shape}, operator has {n} columns"
                )

    @property
    def shape(self):
        return self.op.shape


def sample_gaussian(m: int, n: int, rng: Rng) -> DenseOperator:
    """Complex Gaussian sampling matrix with unit-variance entries (re, im variance 1/2)."""
    if m < 1 or n < 1:
        raise ArgumentError(f"M and N must be >= 1, got M={m}, N={n}")
    return DenseOperator(rng.complex_normal((m, n), variance=1.0))


def sample_octanary(shape, rng: Rng) -> np.ndarray:
    """Draw i.i.d. octanary modulation entries."""
    phases = OCTANARY_PHASES[rng.integers(0, 4, shape)]
    magnitudes = np.where(rng.random(shape) < OCTANARY_LOW_PROB, OCTANARY_LOW, OCTANARY_HIGH)
    return phases * magnitudes


def sample_cdp(n: int, l_patterns: int, rng: Rng) -> CdpOperator:
    """CDP operator with ``l_patterns`` octanary patterns, M = L * N."""
    if n < 1 or l_patterns < 1:
        raise ArgumentError(f"N and L must be >= 1, got N={n}, L={l_patterns}")
    return CdpOperator(sample_octanary((l_patterns, n), rng))


def forward_intensity(op: MeasurementOperator, z) -> np.ndarray:
    """Elementwise |Az|^2."""
    return np.abs(op.apply(z)) ** 2


def corrupt(y_clean, x_norm_sq: float, spec: CorruptionSpec, rng: Rng) -> CorruptionResult:
    """
    Inject uniform noise and sparse uniform outliers.

    w_m ~ U(0, sigma ||x||^2); floor(rho M) outliers on a support drawn
    uniformly without replacement with magnitudes U(0, theta ||x||^2), negated
    with probability 1/2 when ``signed_outliers``. The result is clamped at 0.

    Args:
        y_clean: clean intensities
        x_norm_sq: ||x||^2 of the ground truth
        spec: corruption parameters
        rng: single-owner random stream

    Returns:
        CorruptionResult with y, the outlier support, w and eta
    """
    y_clean = np.asarray(y_clean, dtype=np.float64)
    if np.any(y_clean < 0):
        raise ArgumentError("Clean intensities must be nonnegative")
    if (spec.sigma > 0 or spec.theta > 0) and x_norm_sq <= 0:
        raise ArgumentError("||x||^2 must be positive when sigma or theta is positive")
    m = y_clean.shape[0]
    count = int(np.floor(spec.rho * m))
    if count >= m and m > 0:
        raise ArgumentError(f"Outlier count {count} must be below M={m}")

    noise = rng.uniform(0.0, 1.0, m) * (spec.sigma * x_norm_sq)
    outliers = np.zeros(m)
    support = np.zeros(0, dtype=np.int64)
    if count:
        support = np.sort(rng.choice(m, size=count, replace=False))
        magnitudes = rng.uniform(0.0, 1.0, count) * (spec.theta * x_norm_sq)
        if spec.signed_outliers:
            magnitudes = np.where(rng.random(count) < 0.5, -magnitudes, magnitudes)
        outliers[support] = magnitudes

    y = np.maximum(y_clean + outliers + noise, 0.0)
    return CorruptionResult(y=y, outlier_support=support, noise=noise, outliers=outliers)


def noise_level_for_snr(y_clean, x_norm_sq: float, snr_db: float) -> float:
    """
    Noise parameter sigma giving the requested SNR for U(0, sigma ||x||^2) noise.

    SNR = 10 log10(var(y) / var(w)) with var(w) = (sigma ||x||^2)^2 / 12.
    """
    if x_norm_sq <= 0:
        raise ArgumentError("||x||^2 must be positive")
    var_y = float(np.var(np.asarray(y_clean, dtype=np.float64)))
    var_w = var_y / (10.0 ** (snr_db / 10.0))
    return float(np.sqrt(12.0 * var_w) / x_norm_sq)


def generate_problem(model: ModelKind, x, rng: Rng, alpha: float = 6.0, l_patterns: int = 8,
                     corruption: Optional[CorruptionSpec] = None,
                     snr_db: Optional[float] = None, seed: int = 0) -> ProblemInstance:
    """
    Draw an operator, measure ``x`` and corrupt the intensities.

    Args:
        model: Gaussian (M = round(alpha N)) or CDP (M = L N)
        x: ground truth signal
        rng: stream used for the operator and the corruption
        alpha: oversampling factor for the Gaussian model
        l_patterns: number of patterns for the CDP model
        corruption: noise/outlier parameters; ``sigma`` is replaced when ``snr_db`` is given
        snr_db: target SNR for the uniform noise
        seed: recorded in the instance metadata

    Returns:
        ProblemInstance with diagnostics
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    corruption = corruption or CorruptionSpec()
    if model is ModelKind.GAUSSIAN:
        m = int(round(alpha * n))
        op: MeasurementOperator = sample_gaussian(m, n, rng)
        extra = {"alpha": alpha, "n": n, "m": m}
    else:
        op = sample_cdp(n, l_patterns, rng)
        extra = {"l_patterns": l_patterns, "n": n, "m": op.m}

    y_clean = forward_intensity(op, x)
    x_norm_sq = float(np.vdot(x, x).real)
    if snr_db is not None:
        corruption = CorruptionSpec(
            sigma=noise_level_for_snr(y_clean, x_norm_sq, snr_db),
            theta=corruption.theta,
            rho=corruption.rho,
            signed_outliers=corruption.signed_outliers,
        )
    result = corrupt(y_clean, x_norm_sq, corruption, rng)

    meta = ProblemMeta(
        model=model.value,
        seed=seed,
        sigma=corruption.sigma,
        theta=corruption.theta,
        rho=corruption.rho,
        signed_outliers=corruption.signed_outliers,
        snr_db=snr_db,
        extra=extra,
    )
    return ProblemInstance(
        op=op,
        y=result.y,
        x_true=x,
        meta=meta,
        y_clean=y_clean,
        noise=result.noise,
        outlier_support=result.outlier_support,
    )
