"""
Measurement operators.

Every sampling model implements :class:`MeasurementOperator`, providing the
forward map z -> Az, its adjoint u -> A*u and the squared row norms used by
spectral initialization. Row m of A is the conjugate transpose a_m* of the
sampling vector a_m.
"""

from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Dict, Tuple

import numpy as np
from scipy import linalg

from ..core.errors import ArgumentError


class OperatorKind(Enum):
    """Sampling models."""

    DENSE = "dense"      # explicit matrix, e.g. complex Gaussian or a transmission matrix
    CDP = "cdp"          # coded diffraction patterns: DFT of modulated signal
    MASKED = "masked"    # zero-weighted view of another operator


class MeasurementOperator(ABC):
    """Base class for all sampling operators."""

    @property
    @abstractmethod
    def kind(self) -> OperatorKind:
        """Return the sampling model of this operator."""

    @property
    @abstractmethod
    def shape(self) -> Tuple[int, int]:
        """Return (M, N)."""

    @abstractmethod
    def apply(self, z: np.ndarray) -> np.ndarray:
        """Compute Az for a length-N vector."""

    @abstractmethod
    def adjoint_apply(self, u: np.ndarray) -> np.ndarray:
        """Compute A*u for a length-M vector."""

    @abstractmethod
    def row_norms_sq(self) -> np.ndarray:
        """Return ||a_m||^2 for every row."""

    @abstractmethod
    def to_dense(self) -> np.ndarray:
        """Materialize A as an (M, N) complex matrix."""

    @property
    def m(self) -> int:
        return self.shape[0]

    @property
    def n(self) -> int:
        return self.shape[1]

    def _check_signal(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        if z.shape != (self.n,):
            raise ArgumentError(f"Expected a signal of length {self.n}, got shape {z.shape}")
        return z

    def _check_measurements(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=np.complex128)
        if u.shape != (self.m,):
            raise ArgumentError(f"Expected {self.m} measurements, got shape {u.shape}")
        return u

    def get_info(self) -> Dict[str, Any]:
        """Describe this operator for metadata output."""
        m, n = self.shape
        return {"kind": self.kind.value, "m": m, "n": n}


class DenseOperator(MeasurementOperator):
    """Explicit sampling matrix A in C^{M x N}."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
            raise ArgumentError(f"Sampling matrix must be M x N with M, N >= 1, got {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise ArgumentError("Sampling matrix has non-finite entries")
        self.matrix = matrix
        self._row_norms_sq = np.sum(np.abs(matrix) ** 2, axis=1)

    @property
    def kind(self) -> OperatorKind:
        return OperatorKind.DENSE

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    def apply(self, z: np.ndarray) -> np.ndarray:
        return self.matrix @ self._check_signal(z)

    def adjoint_apply(self, u: np.ndarray) -> np.ndarray:
        return self.matrix.conj().T @ self._check_measurements(u)

    def row_norms_sq(self) -> np.ndarray:
        return self._row_norms_sq.copy()

    def to_dense(self) -> np.ndarray:
        return self.matrix.copy()


class CdpOperator(MeasurementOperator):
    """
    Coded diffraction patterns.

    Measurement m = (l, k), stored at index l * N + k, is the k-th entry of the
    unnormalized DFT of z modulated by pattern d_l.
    """

    def __init__(self, patterns: np.ndarray):
        patterns = np.asarray(patterns, dtype=np.complex128)
        if patterns.ndim != 2 or patterns.shape[0] < 1 or patterns.shape[1] < 1:
            raise ArgumentError(f"Patterns must be L x N with L, N >= 1, got {patterns.shape}")
        self.patterns = patterns

    @property
    def kind(self) -> OperatorKind:
        return OperatorKind.CDP

    @property
    def l_patterns(self) -> int:
        return self.patterns.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        n_patterns, n = self.patterns.shape
        return n_patterns * n, n

    def apply(self, z: np.ndarray) -> np.ndarray:
        z = self._check_signal(z)
        return np.fft.fft(self.patterns * z[np.newaxis, :], axis=1).reshape(-1)

    def adjoint_apply(self, u: np.ndarray) -> np.ndarray:
        u = self._check_measurements(u).reshape(self.patterns.shape)
        n = self.n
        # F* u = N * ifft(u) for the unnormalized DFT F
        back = n * np.fft.ifft(u, axis=1)
        return np.sum(np.conj(self.patterns) * back, axis=0)

    def row_norms_sq(self) -> np.ndarray:
        per_pattern = np.sum(np.abs(self.patterns) ** 2, axis=1)
        return np.repeat(per_pattern, self.n)

    def to_dense(self) -> np.ndarray:
        dft = linalg.dft(self.n)
        return np.vstack([dft * pattern[np.newaxis, :] for pattern in self.patterns])

    def get_info(self) -> Dict[str, Any]:
        info = super().get_info()
        info["l_patterns"] = self.l_patterns
        return info


class MaskedOperator(MeasurementOperator):
    """
    Zero-weighted view of another operator.

    Rows with weight 0 contribute nothing to Az, A*u or the row norms, which is
    equivalent to deleting them for every loss in ``rkldwf.losses``.
    """

    def __init__(self, base: MeasurementOperator, weights: np.ndarray):
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (base.m,):
            raise ArgumentError(f"Mask has length {weights.shape}, operator has {base.m} rows")
        self.base = base
        self.weights = weights

    @property
    def kind(self) -> OperatorKind:
        return OperatorKind.MASKED

    @property
    def shape(self) -> Tuple[int, int]:
        return self.base.shape

    def apply(self, z: np.ndarray) -> np.ndarray:
        return self.weights * self.base.apply(z)

    def adjoint_apply(self, u: np.ndarray) -> np.ndarray:
        return self.base.adjoint_apply(self.weights * self._check_measurements(u))

    def row_norms_sq(self) -> np.ndarray:
        return self.weights ** 2 * self.base.row_norms_sq()

    def to_dense(self) -> np.ndarray:
        return self.weights[:, np.newaxis] * self.base.to_dense()

    def get_info(self) -> Dict[str, Any]:
        info = super().get_info()
        info["base"] = self.base.get_info()
        info["kept"] = int(np.count_nonzero(self.weights))
        return info
