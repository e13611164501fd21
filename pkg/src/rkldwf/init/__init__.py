"""Spectral initialization."""

from .spectral import (
    SpectralEstimate,
    SpectralWeights,
    WeightKind,
    classical_weights,
    norm_estimate,
    rkld_weights,
    spectral_estimate,
)

__all__ = [
    "SpectralEstimate",
    "SpectralWeights",
    "WeightKind",
    "classical_weights",
    "norm_estimate",
    "rkld_weights",
    "spectral_estimate",
]
