"""Measurement models: operators, problem generation, corruption, loss landscapes."""

from .generation import (
    CorruptionResult,
    CorruptionSpec,
    ModelKind,
    ProblemInstance,
    ProblemMeta,
    corrupt,
    forward_intensity,
    generate_problem,
    noise_level_for_snr,
    sample_cdp,
    sample_gaussian,
    sample_octanary,
)
from .landscape import GridSpec, loss_surface_grid
from .operators import (
    CdpOperator,
    DenseOperator,
    MaskedOperator,
    MeasurementOperator,
    OperatorKind,
)

__all__ = [
    "CorruptionResult",
    "CorruptionSpec",
    "ModelKind",
    "ProblemInstance",
    "ProblemMeta",
    "corrupt",
    "forward_intensity",
    "generate_problem",
    "noise_level_for_snr",
    "sample_cdp",
    "sample_gaussian",
    "sample_octanary",
    "GridSpec",
    "loss_surface_grid",
    "CdpOperator",
    "DenseOperator",
    "MaskedOperator",
    "MeasurementOperator",
    "OperatorKind",
]
