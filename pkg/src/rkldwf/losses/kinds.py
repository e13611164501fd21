"""Loss descriptors and evaluation results."""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from ..core.errors import ArgumentError

DEFAULT_RKLD_LAMBDA = 1e-8
POISSON_EPSILON_FACTOR = 1e-12


class LossName(Enum):
    """Supported losses."""

    RKLD = "rkld"                  # regularized reverse KL divergence
    INTENSITY_L2 = "intensity_l2"  # least squares on intensities (WF)
    POISSON = "poisson"            # Poisson likelihood, i.e. forward KL divergence
    RESHAPED_L2 = "reshaped_l2"    # least squares on amplitudes (RWF)


@dataclass(frozen=True)
class LossKind:
    """
    A loss together with its parameter.

    ``lam`` is the RKLD regularizer (0 < lam < 1). ``epsilon`` guards the Poisson
    denominator; None means 1e-12 * mean(y) at evaluation time.
    """

    name: LossName
    lam: float = DEFAULT_RKLD_LAMBDA
    epsilon: Optional[float] = None

    def __post_init__(self):
        if self.name is LossName.RKLD and not 0.0 < self.lam < 1.0:
            raise ArgumentError(f"RKLD regularizer must lie in (0, 1), got {self.lam}")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ArgumentError(f"Poisson guard must be positive, got {self.epsilon}")

    @classmethod
    def rkld(cls, lam: float = DEFAULT_RKLD_LAMBDA) -> "LossKind":
        return cls(LossName.RKLD, lam=lam)

    @classmethod
    def intensity_l2(cls) -> "LossKind":
        return cls(LossName.INTENSITY_L2)

    @classmethod
    def poisson(cls, epsilon: Optional[float] = None) -> "LossKind":
        return cls(LossName.POISSON, epsilon=epsilon)

    @classmethod
    def reshaped_l2(cls) -> "LossKind":
        return cls(LossName.RESHAPED_L2)

    def poisson_guard(self, y: np.ndarray) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return max(POISSON_EPSILON_FACTOR * float(np.mean(y)), np.finfo(np.float64).tiny)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"name": self.name.value}
        if self.name is LossName.RKLD:
            data["lambda"] = self.lam
        if self.name is LossName.POISSON:
            data["epsilon"] = self.epsilon
        return data


@dataclass
class LossEval:
    """Loss value, Wirtinger gradient and the forward product it was computed from."""

    value: float
    grad: np.ndarray
    az: Optional[np.ndarray] = None

    @property
    def grad_norm(self) -> float:
        return float(np.linalg.norm(self.grad))
