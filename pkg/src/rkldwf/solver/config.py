"""
Solver configuration: step policies, initialization and named presets.

Effective step at iteration k is mu_k * s where s = 1/M when
``scale_per_measurement`` is set, times 1/||z0||^2 when ``scale_by_init_norm``
is set. Losses and gradients are evaluated unnormalized.
"""

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Optional, Union

import numpy as np

from ..core.errors import ArgumentError, ConfigError
from ..core.linalg import DEFAULT_EIG_MAX_ITERS, DEFAULT_EIG_TOL
from ..losses.kinds import DEFAULT_RKLD_LAMBDA, LossKind
from ..truncation.masks import TruncationKind

DEFAULT_MAX_ITERS = 500
DEFAULT_STOP_TOL = 1e-12
DEFAULT_DIVERGENCE_FACTOR = 1e6


class StepName(Enum):
    """Step-size policies."""

    FIXED = "fixed"
    HEURISTIC = "heuristic"        # mu_k = min(1 - exp(-(k+1)/k0), mu_max)
    BACKTRACKING = "backtracking"  # Armijo line search


@dataclass(frozen=True)
class StepPolicy:
    """A step-size policy with its parameters; unused parameters are ignored."""

    name: StepName = StepName.FIXED
    mu: float = 0.6
    k0: float = 330.0
    mu_max: float = 0.2
    beta: float = 0.5
    c: float = 1e-4
    mu0: float = 1.0
    max_shrinks: int = 60

    def __post_init__(self):
        if not (self.mu > 0 and self.mu_max > 0 and self.mu0 > 0):
            raise ArgumentError("Step sizes must be positive")
        if not self.k0 > 0:
            raise ArgumentError(f"k0 must be positive, got {self.k0}")
        if not (0 < self.beta < 1 and 0 < self.c < 1):
            raise ArgumentError(
                f"Backtracking needs 0 < beta, c < 1, got beta={self.beta}, c={self.c}"
            )
        if self.max_shrinks < 1:
            raise ArgumentError("max_shrinks must be at least 1")

    @classmethod
    def fixed(cls, mu: float) -> "StepPolicy":
        return cls(StepName.FIXED, mu=mu)

    @classmethod
    def heuristic(cls, k0: float = 330.0, mu_max: float = 0.2) -> "StepPolicy":
        return cls(StepName.HEURISTIC, k0=k0, mu_max=mu_max)

    @classmethod
    def backtracking(cls, beta: float = 0.5, c: float = 1e-4, mu0: float = 1.0) -> "StepPolicy":
        return cls(StepName.BACKTRACKING, beta=beta, c=c, mu0=mu0)

    def scheduled(self, k: int) -> float:
        """Step for iteration k (0-based) before any line search."""
        if self.name is StepName.FIXED:
            return self.mu
        if self.name is StepName.HEURISTIC:
            return float(min(1.0 - np.exp(-(k + 1) / self.k0), self.mu_max))
        return self.mu0

    def to_dict(self) -> Dict[str, Any]:
        if self.name is StepName.FIXED:
            return {"name": self.name.value, "mu": self.mu}
        if self.name is StepName.HEURISTIC:
            return {"name": self.name.value, "k0": self.k0, "mu_max": self.mu_max}
        return {"name": self.name.value, "beta": self.beta, "c": self.c, "mu0": self.mu0}


class InitName(Enum):
    """Initializers."""

    CLASSICAL = "classical"
    RKLD = "rkld"
    PROVIDED = "provided"


@dataclass(frozen=True)
class InitPolicy:
    """Initializer choice; ``z0`` is required for PROVIDED."""

    name: InitName = InitName.RKLD
    z0: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if self.name is InitName.PROVIDED and self.z0 is None:
            raise ArgumentError("Provided initialization needs z0")

    @classmethod
    def provided(cls, z0) -> "InitPolicy":
        return cls(InitName.PROVIDED, z0=np.asarray(z0, dtype=np.complex128))

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name.value}


@dataclass(frozen=True)
class SolverConfig:
    """
    Everything that defines a solver run.

    Attributes:
        loss: loss minimized
        truncation: per-iteration mask builder
        step: step-size policy
        max_iters: iteration cap K
        stop_tol: stop once ||z_{k+1} - z_k|| < stop_tol
        init: initializer
        scale_per_measurement: multiply steps by 1/M
        scale_by_init_norm: multiply steps by 1/||z0||^2
        init_scale: overrides the spectral norm estimate
        divergence_factor: abort once the loss exceeds this multiple of the initial loss
        name: preset name or a user label
    """

    loss: LossKind = field(default_factory=LossKind.rkld)
    truncation: TruncationKind = field(default_factory=TruncationKind.none)
    step: StepPolicy = field(default_factory=lambda: StepPolicy.fixed(0.6))
    max_iters: int = DEFAULT_MAX_ITERS
    stop_tol: float = DEFAULT_STOP_TOL
    init: InitPolicy = field(default_factory=InitPolicy)
    scale_per_measurement: bool = True
    scale_by_init_norm: bool = False
    init_scale: Optional[float] = None
    eig_max_iters: int = DEFAULT_EIG_MAX_ITERS
    eig_tol: float = DEFAULT_EIG_TOL
    divergence_factor: float = DEFAULT_DIVERGENCE_FACTOR
    name: str = "custom"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ArgumentError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.stop_tol < 0:
            raise ArgumentError(f"stop_tol must be >= 0, got {self.stop_tol}")
        if self.init_scale is not None and self.init_scale <= 0:
            raise ArgumentError(f"init_scale must be positive, got {self.init_scale}")
        if not self.divergence_factor > 1:
            raise ArgumentError(f"divergence_factor must exceed 1, got {self.divergence_factor}")

    def with_overrides(self, **fields: Any) -> "SolverConfig":
        """Copy with some fields replaced; unknown field names raise ConfigError."""
        known = {f.name for f in dataclasses.fields(self)}
        unknown = sorted(set(fields) - known)
        if unknown:
            raise ConfigError(f"Unknown solver fields: {', '.join(unknown)}", key=unknown[0])
        return dataclasses.replace(self, **fields)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "loss": self.loss.to_dict(),
            "truncation": self.truncation.to_dict(),
            "step": self.step.to_dict(),
            "max_iters": self.max_iters,
            "stop_tol": self.stop_tol,
            "init": self.init.to_dict(),
            "scale_per_measurement": self.scale_per_measurement,
            "scale_by_init_norm": self.scale_by_init_norm,
            "init_scale": self.init_scale,
        }


def _rkld(step: Union[float, StepPolicy],
          truncation: TruncationKind) -> Callable[[], SolverConfig]:
    policy = step if isinstance(step, StepPolicy) else StepPolicy.fixed(step)
    return lambda: SolverConfig(
        loss=LossKind.rkld(DEFAULT_RKLD_LAMBDA),
        truncation=truncation,
        step=policy,
        init=InitPolicy(InitName.RKLD),
    )


def _baseline(loss: LossKind, step: StepPolicy, truncation: Optional[TruncationKind] = None,
              scale_by_init_norm: bool = False) -> Callable[[], SolverConfig]:
    return lambda: SolverConfig(
        loss=loss,
        truncation=truncation or TruncationKind.none(),
        step=step,
        init=InitPolicy(InitName.CLASSICAL),
        scale_by_init_norm=scale_by_init_norm,
    )


PRESETS: Dict[str, Callable[[], SolverConfig]] = {
    "rkld-wf-gaussian": _rkld(0.6, TruncationKind.none()),
    "rkld-wf-cdp": _rkld(0.4, TruncationKind.none()),
    "rkld-mtwf": _rkld(0.6, TruncationKind.median_residual()),
    "rkld-gtwf": _rkld(0.6, TruncationKind.one_sided_log()),
    "rkld-mtwf-cdp": _rkld(0.4, TruncationKind.median_residual()),
    "rkld-gtwf-cdp": _rkld(0.4, TruncationKind.one_sided_log()),
    "wf-l2": _baseline(LossKind.intensity_l2(), StepPolicy.heuristic(330.0, 0.2),
                       scale_by_init_norm=True),
    "wf-poisson": _baseline(LossKind.poisson(), StepPolicy.heuristic(330.0, 0.2)),
    "rwf": _baseline(LossKind.reshaped_l2(), StepPolicy.fixed(1.6)),
    "median-twf": _baseline(LossKind.poisson(), StepPolicy.fixed(0.4),
                            TruncationKind.median_residual()),
    "median-rwf": _baseline(LossKind.reshaped_l2(), StepPolicy.fixed(1.2),
                            TruncationKind.median_residual()),
    "twf": _baseline(LossKind.poisson(), StepPolicy.fixed(0.4), TruncationKind.mean_residual()),
    "wf-l2-backtracking": _baseline(LossKind.intensity_l2(), StepPolicy.backtracking()),
    "twf-backtracking": _baseline(LossKind.poisson(), StepPolicy.backtracking(),
                                  TruncationKind.mean_residual()),
    "rwf-backtracking": _baseline(LossKind.reshaped_l2(), StepPolicy.backtracking()),
    "rkld-wf-backtracking": _rkld(StepPolicy.backtracking(), TruncationKind.none()),
}


def preset(name: str) -> SolverConfig:
    """
    Named solver configuration.

    Args:
        name: one of PRESETS

    Returns:
        SolverConfig labelled with ``name``

    Raises:
        ConfigError: unknown preset
    """
    factory = PRESETS.get(name)
    if factory is None:
        raise ConfigError(
            f"Unknown preset '{name}'; choose from {', '.join(sorted(PRESETS))}", key="preset"
        )
    return dataclasses.replace(factory(), name=name)
