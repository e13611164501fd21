"""Truncation masks for robust gradients."""

from .masks import (
    DEFAULT_GAMMA_E,
    DEFAULT_GAMMA_H,
    DEFAULT_GAMMA_UB,
    Mask,
    TruncationKind,
    TruncationName,
    apply_mask,
    build_mask,
    log_residuals,
    mean_residual_mask,
    median_residual_mask,
    one_sided_log_mask,
    with_minimum_keep,
)

__all__ = [
    "DEFAULT_GAMMA_E",
    "DEFAULT_GAMMA_H",
    "DEFAULT_GAMMA_UB",
    "Mask",
    "TruncationKind",
    "TruncationName",
    "apply_mask",
    "build_mask",
    "log_residuals",
    "mean_residual_mask",
    "median_residual_mask",
    "one_sided_log_mask",
    "with_minimum_keep",
]
