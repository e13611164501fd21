"""Loss values and Wirtinger gradients."""

from .divergence import (
    baseline_eval,
    evaluate,
    loss_terms,
    loss_value,
    rkld_constrained_value,
    rkld_grad,
    rkld_value,
)
from .kinds import DEFAULT_RKLD_LAMBDA, LossEval, LossKind, LossName

__all__ = [
    "baseline_eval",
    "evaluate",
    "loss_terms",
    "loss_value",
    "rkld_constrained_value",
    "rkld_grad",
    "rkld_value",
    "DEFAULT_RKLD_LAMBDA",
    "LossEval",
    "LossKind",
    "LossName",
]
