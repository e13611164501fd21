"""Evaluation metrics."""

from .evaluation import (
    AGGREGATE_COLUMNS,
    CURVE_COLUMNS,
    DEFAULT_SUCCESS_THRESHOLD,
    TRIAL_COLUMNS,
    AggregateRow,
    CurveRow,
    TrialCurve,
    TrialRecord,
    acc,
    acc_over_images,
    aggregate,
    aggregate_curves,
    are,
    correlation,
    error_curve,
    snr_db,
    success_interval,
    success_probability,
)

__all__ = [
    "AGGREGATE_COLUMNS",
    "CURVE_COLUMNS",
    "DEFAULT_SUCCESS_THRESHOLD",
    "TRIAL_COLUMNS",
    "AggregateRow",
    "CurveRow",
    "TrialCurve",
    "TrialRecord",
    "acc",
    "acc_over_images",
    "aggregate",
    "aggregate_curves",
    "are",
    "correlation",
    "error_curve",
    "snr_db",
    "success_interval",
    "success_probability",
]
