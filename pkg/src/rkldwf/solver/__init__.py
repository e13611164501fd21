"""Gradient-descent solvers and presets."""

from .config import (
    DEFAULT_MAX_ITERS,
    DEFAULT_STOP_TOL,
    PRESETS,
    InitName,
    InitPolicy,
    SolverConfig,
    StepName,
    StepPolicy,
    preset,
)
from .runner import (
    AbortReason,
    AbortRecord,
    SolverResult,
    TraceRecord,
    initialize,
    run,
)

__all__ = [
    "DEFAULT_MAX_ITERS",
    "DEFAULT_STOP_TOL",
    "PRESETS",
    "InitName",
    "InitPolicy",
    "SolverConfig",
    "StepName",
    "StepPolicy",
    "preset",
    "AbortReason",
    "AbortRecord",
    "SolverResult",
    "TraceRecord",
    "initialize",
    "run",
]
