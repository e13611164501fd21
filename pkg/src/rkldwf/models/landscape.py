"""Loss landscapes over a real two-dimensional grid."""

import logging
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from ..core.errors import ArgumentError
from ..losses.divergence import loss_value
from ..losses.kinds import LossKind
from .operators import MeasurementOperator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid over z = (u, v) in R^2."""

    u_min: float = -2.0
    u_max: float = 2.0
    nu: int = 101
    v_min: float = -2.0
    v_max: float = 2.0
    nv: int = 101

    def __post_init__(self):
        if self.nu < 1 or self.nv < 1:
            raise ArgumentError(f"Grid needs at least one point per axis, got {self.nu}x{self.nv}")
        if self.u_max < self.u_min or self.v_max < self.v_min:
            raise ArgumentError("Grid bounds must satisfy min <= max")

    def axes(self):
        us = np.linspace(self.u_min, self.u_max, self.nu)
        vs = np.linspace(self.v_min, self.v_max, self.nv)
        return us, vs

    def to_dict(self) -> Dict[str, Any]:
        return {
            "u": [self.u_min, self.u_max, self.nu],
            "v": [self.v_min, self.v_max, self.nv],
        }


def loss_surface_grid(op: MeasurementOperator, y, kind: LossKind, grid: GridSpec,
                      normalize: bool = False) -> np.ndarray:
    """
    Evaluate a loss on a real grid for plotting.

    Args:
        op: operator with N = 2
        y: measurements
        kind: loss to evaluate
        grid: grid description
        normalize: min-max scale the surface to [0, 1]

    Returns:
        (nv, nu) array; entry [j, i] is the loss at z = (u_i, v_j)
    """
    if op.n != 2:
        raise ArgumentError(f"Loss landscapes need N = 2, got N = {op.n}")
    us, vs = grid.axes()
    surface = np.empty((grid.nv, grid.nu), dtype=np.float64)
    for j, v in enumerate(vs):
        for i, u in enumerate(us):
            z = np.array([u, v], dtype=np.complex128)
            surface[j, i] = loss_value(kind, z, op, y)

    if normalize:
        low, high = float(np.min(surface)), float(np.max(surface))
        span = high - low
        surface = (surface - low) / span if span > 0 else np.zeros_like(surface)
    logger.debug("Computed %s landscape on %dx%d grid", kind.name.value, grid.nv, grid.nu)
    return surface
