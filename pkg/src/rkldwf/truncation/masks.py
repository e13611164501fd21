"""
Per-iteration truncation masks.

Each builder compares a per-measurement residual statistic against a robust
threshold and keeps the indices that pass. A mask never comes out empty: when
nothing passes, the ceil(M/2) indices with the smallest criterion value are kept.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..core.errors import ArgumentError
from ..models.operators import MaskedOperator, MeasurementOperator

logger = logging.getLogger(__name__)

DEFAULT_GAMMA_E = 3.0
DEFAULT_GAMMA_UB = 5.0
DEFAULT_GAMMA_H = 3.0


class TruncationName(Enum):
    """Truncation schemes."""

    NONE = "none"
    MEAN_RESIDUAL = "mean_residual"
    MEDIAN_RESIDUAL = "median_residual"
    ONE_SIDED_LOG = "one_sided_log"


@dataclass(frozen=True)
class TruncationKind:
    """A truncation scheme with its thresholds; unused thresholds are ignored."""

    name: TruncationName = TruncationName.NONE
    gamma_e: float = DEFAULT_GAMMA_E
    gamma_ub: float = DEFAULT_GAMMA_UB
    gamma_h: float = DEFAULT_GAMMA_H

    def __post_init__(self):
        for label, value in (("gamma_e", self.gamma_e), ("gamma_ub", self.gamma_ub),
                             ("gamma_h", self.gamma_h)):
            if not value > 0:
                raise ArgumentError(f"Truncation threshold {label} must be positive, got {value}")

    @classmethod
    def none(cls) -> "TruncationKind":
        return cls(TruncationName.NONE)

    @classmethod
    def mean_residual(cls, gamma_e: float = DEFAULT_GAMMA_E) -> "TruncationKind":
        return cls(TruncationName.MEAN_RESIDUAL, gamma_e=gamma_e)

    @classmethod
    def median_residual(cls, gamma_ub: float = DEFAULT_GAMMA_UB,
                        gamma_e: float = DEFAULT_GAMMA_E) -> "TruncationKind":
        return cls(TruncationName.MEDIAN_RESIDUAL, gamma_e=gamma_e, gamma_ub=gamma_ub)

    @classmethod
    def one_sided_log(cls, gamma_h: float = DEFAULT_GAMMA_H) -> "TruncationKind":
        return cls(TruncationName.ONE_SIDED_LOG, gamma_h=gamma_h)

    @property
    def enabled(self) -> bool:
        return self.name is not TruncationName.NONE

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"name": self.name.value}
        if self.name in (TruncationName.MEAN_RESIDUAL, TruncationName.MEDIAN_RESIDUAL):
            data["gamma_e"] = self.gamma_e
        if self.name is TruncationName.MEDIAN_RESIDUAL:
            data["gamma_ub"] = self.gamma_ub
        if self.name is TruncationName.ONE_SIDED_LOG:
            data["gamma_h"] = self.gamma_h
        return data


@dataclass
class Mask:
    """
    Index set kept in the gradient.

    Attributes:
        keep: boolean vector of length M
        scores: criterion value per index (smaller is more trustworthy)
        fallback_used: True when the minimum-keep rule replaced an empty set
    """

    keep: np.ndarray
    scores: Optional[np.ndarray] = None
    fallback_used: bool = False
    kept_count: int = field(init=False)

    def __post_init__(self):
        self.keep = np.asarray(self.keep, dtype=bool)
        self.kept_count = int(np.count_nonzero(self.keep))

    @property
    def size(self) -> int:
        return int(self.keep.shape[0])

    @property
    def weights(self) -> np.ndarray:
        return self.keep.astype(np.float64)


def with_minimum_keep(mask: Mask) -> Mask:
    """Return ``mask`` or, when it is empty, the ceil(M/2) indices with the smallest scores."""
    if mask.kept_count > 0 or mask.size == 0:
        return mask
    m = mask.size
    scores = mask.scores if mask.scores is not None else np.zeros(m)
    order = np.argsort(scores, kind="stable")
    keep = np.zeros(m, dtype=bool)
    keep[order[: (m + 1) // 2]] = True
    logger.warning("Truncation emptied the index set; keeping the %d best of %d", (m + 1) // 2, m)
    return Mask(keep=keep, scores=mask.scores, fallback_used=True)


def _intensities(z, op: MeasurementOperator, y, az: Optional[np.ndarray]):
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (op.m,):
        raise ArgumentError(f"Expected {op.m} measurements, got shape {y.shape}")
    if az is None:
        az = op.apply(z)
    return y, np.abs(az), np.abs(az) ** 2


def mean_residual_mask(z, op: MeasurementOperator, y, gamma_e: float = DEFAULT_GAMMA_E,
                       az: Optional[np.ndarray] = None) -> Mask:
    """Keep m iff |y_m - q_m| <= gamma_e * mean(|y - q|)."""
    if not gamma_e > 0:
        raise ArgumentError(f"gamma_e must be positive, got {gamma_e}")
    y, _, q = _intensities(z, op, y, az)
    residuals = np.abs(y - q)
    keep = residuals <= gamma_e * np.mean(residuals)
    return with_minimum_keep(Mask(keep=keep, scores=residuals))


def median_residual_mask(z, op: MeasurementOperator, y, gamma_ub: float = DEFAULT_GAMMA_UB,
                         gamma_e: float = DEFAULT_GAMMA_E,
                         az: Optional[np.ndarray] = None) -> Mask:
    """
    Median-residual truncation with the anisotropy factor |a_m* z| / ||z||.

    Keep m iff |a_m* z|/||z|| <= gamma_ub and
    |y_m - q_m| <= gamma_e * median(|y - q|) * |a_m* z|/||z||.

    Args:
        z: current estimate, nonzero
        op: measurement operator
        y: measurements
        gamma_ub: bound on the anisotropy factor
        gamma_e: multiple of the median residual
        az: precomputed op.apply(z)

    Returns:
        Mask with at least one kept index
    """
    if not (gamma_ub > 0 and gamma_e > 0):
        raise ArgumentError(
            f"Thresholds must be positive, got gamma_ub={gamma_ub}, gamma_e={gamma_e}"
        )
    z_norm = float(np.linalg.norm(z))
    if z_norm == 0.0:
        raise ArgumentError("Median truncation is undefined at z = 0")
    y, amplitudes, q = _intensities(z, op, y, az)
    residuals = np.abs(y - q)
    ratio = amplitudes / z_norm
    keep = (ratio <= gamma_ub) & (residuals <= gamma_e * np.median(residuals) * ratio)
    scores = residuals / np.maximum(ratio, np.finfo(np.float64).tiny)
    return with_minimum_keep(Mask(keep=keep, scores=scores))


def log_residuals(y, q) -> np.ndarray:
    """
    r_m = log y_m - log q_m.

    y_m = 0 gives -inf (whatever q_m is); q_m = 0 with y_m > 0 gives +inf.
    """
    y = np.asarray(y, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    r = np.empty_like(y)
    zero_y = y == 0
    zero_q = (q == 0) & ~zero_y
    regular = ~(zero_y | zero_q)
    r[zero_y] = -np.inf
    r[zero_q] = np.inf
    r[regular] = np.log(y[regular]) - np.log(q[regular])
    return r


def one_sided_log_mask(z, op: MeasurementOperator, y, gamma_h: float = DEFAULT_GAMMA_H,
                       az: Optional[np.ndarray] = None) -> Mask:
    """
    One-sided truncation on the residual of logarithms.

    Keep m iff r_m <= gamma_h * median(r). Entries with y_m = 0 have r_m = -inf
    and are always kept. The threshold may be negative; a median that is
    undefined (-inf and +inf as the central pair) is taken as 0.
    """
    if not gamma_h > 0:
        raise ArgumentError(f"gamma_h must be positive, got {gamma_h}")
    y, _, q = _intensities(z, op, y, az)
    r = log_residuals(y, q)
    with np.errstate(invalid="ignore"):
        center = float(np.median(r))
    if np.isnan(center):
        center = 0.0
    with np.errstate(invalid="ignore"):
        threshold = gamma_h * center
    keep = r <= threshold
    return with_minimum_keep(Mask(keep=keep, scores=r))


def build_mask(kind: TruncationKind, z, op: MeasurementOperator, y,
               az: Optional[np.ndarray] = None) -> Optional[Mask]:
    """Dispatch on ``kind``; returns None for TruncationName.NONE."""
    if not kind.enabled:
        return None
    if kind.name is TruncationName.MEAN_RESIDUAL:
        return mean_residual_mask(z, op, y, kind.gamma_e, az=az)
    if kind.name is TruncationName.MEDIAN_RESIDUAL:
        return median_residual_mask(z, op, y, kind.gamma_ub, kind.gamma_e, az=az)
    if kind.name is TruncationName.ONE_SIDED_LOG:
        return one_sided_log_mask(z, op, y, kind.gamma_h, az=az)
    raise ArgumentError(f"Unknown truncation: {kind.name}")


def apply_mask(op: MeasurementOperator, y, mask: Mask) -> Tuple[MeasurementOperator, np.ndarray]:
    """
    Zero-weight the rows and measurements a mask drops.

    Args:
        op: measurement operator
        y: measurements
        mask: index set; an empty mask goes through the minimum-keep rule

    Returns:
        (operator view, masked measurements); the inputs themselves when all rows are kept
    """
    y = np.asarray(y, dtype=np.float64)
    if mask.size != op.m or y.shape != (op.m,):
        raise ArgumentError(f"Mask of length {mask.size} does not match {op.m} measurements")
    mask = with_minimum_keep(mask)
    if mask.kept_count == mask.size:
        return op, y
    weights = mask.weights
    return MaskedOperator(op, weights), y * weights
