"""Core primitives: errors, seeded streams, phase-invariant distance, eigensolver."""

from .errors import (
    ArgumentError,
    ArrayFileError,
    BadMagicError,
    ConfigError,
    PhaseRetrievalError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
    UnsupportedVersionError,
)
from .linalg import (
    EigenResult,
    align_phase,
    as_complex_vector,
    dist_up_to_phase,
    leading_eigvec,
    optimal_phase,
    relative_error,
)
from .rng import Rng, derive_seed

__all__ = [
    "ArgumentError",
    "ArrayFileError",
    "BadMagicError",
    "ConfigError",
    "PhaseRetrievalError",
    "TruncatedPayloadError",
    "UnsupportedDtypeError",
    "UnsupportedVersionError",
    "EigenResult",
    "align_phase",
    "as_complex_vector",
    "dist_up_to_phase",
    "leading_eigvec",
    "optimal_phase",
    "relative_error",
    "Rng",
    "derive_seed",
]
