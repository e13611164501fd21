"""Monte-Carlo experiment harness."""

from .experiment import (
    DEFAULT_ARE_CAP,
    SWEEP_AXES,
    ExperimentSpec,
    ResultTable,
    SignalKind,
    SweepPoint,
    run_experiment,
    signal_draw,
)

__all__ = [
    "DEFAULT_ARE_CAP",
    "SWEEP_AXES",
    "ExperimentSpec",
    "ResultTable",
    "SignalKind",
    "SweepPoint",
    "run_experiment",
    "signal_draw",
]
