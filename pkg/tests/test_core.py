"""Tests for rkldwf.core: errors, seeded streams, distances and the eigensolver"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from rkldwf.core.errors import (
    ArgumentError,
    ArrayFileError,
    BadMagicError,
    ConfigError,
    PhaseRetrievalError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
    UnsupportedVersionError,
)
from rkldwf.core.linalg import (
    align_phase,
    as_complex_vector,
    dist_up_to_phase,
    leading_eigvec,
    optimal_phase,
    relative_error,
)
from rkldwf.core.rng import Rng, derive_seed


def _unitary(n, seed):
    q, _ = np.linalg.qr(Rng(seed).complex_normal((n, n)))
    return q


class TestErrors:
    """Tests for the exception hierarchy."""

    def test_argument_error_is_value_error(self):
        """Argument errors can be caught as ValueError."""
        assert issubclass(ArgumentError, ValueError)
        assert issubclass(ArgumentError, PhaseRetrievalError)

    def test_config_error_carries_key_and_path(self):
        """ConfigError records the offending key and file."""
        err = ConfigError("bad", key="solver.mu", path="run.yaml")
        assert err.key == "solver.mu"
        assert err.path == "run.yaml"
        assert isinstance(err, ArgumentError)

    def test_array_file_error_kinds_are_distinct(self):
        """Each array file error has its own kind."""
        kinds = {cls.kind for cls in (BadMagicError, UnsupportedVersionError,
                                      UnsupportedDtypeError, TruncatedPayloadError)}
        assert len(kinds) == 4
        assert all(issubclass(cls, ArrayFileError)
                   for cls in (BadMagicError, TruncatedPayloadError))


class TestDeriveSeed:
    """Tests for seed derivation."""

    def test_deterministic(self):
        """Same parts give the same seed."""
        assert derive_seed(1, "alpha", 6.0, 3) == derive_seed(1, "alpha", 6.0, 3)

    def test_parts_change_seed(self):
        """Any differing component changes the seed."""
        base = derive_seed(1, "alpha", 6.0, 3)
        assert derive_seed(1, "alpha", 6.0, 4) != base
        assert derive_seed(2, "alpha", 6.0, 3) != base
        assert derive_seed(1, "rho", 6.0, 3) != base
        assert derive_seed(1, "alpha", 6.000001, 3) != base

    def test_long_labels_distinct(self):
        """Labels sharing a long prefix still give different seeds."""
        assert derive_seed(0, "l_patterns") != derive_seed(0, "l_patter")
        assert derive_seed(0, "signal_a") != derive_seed(0, "signal_b_with_suffix")
        assert derive_seed(0, "abcdefgh1", 1) != derive_seed(0, "abcdefgh2", 1)

    def test_part_types_distinct(self):
        """Equal-looking parts of different types and splits do not collide."""
        assert derive_seed(0, 6) != derive_seed(0, 6.0)
        assert derive_seed(0, "ab", "c") != derive_seed(0, "a", "bc")
        assert derive_seed(0, "") != derive_seed(0)

    def test_range(self):
        """Seeds are 64-bit unsigned integers."""
        seed = derive_seed(0)
        assert 0 <= seed < 2 ** 64

    def test_unsupported_part(self):
        """Non-numeric, non-string parts are rejected."""
        with pytest.raises(ArgumentError):
            derive_seed(0, None)

    def test_no_collisions_over_grid(self):
        """Seeds over a trial grid are pairwise distinct."""
        seeds = {derive_seed(7, "alpha", float(a), t) for a in (3, 4, 5, 6) for t in range(50)}
        assert len(seeds) == 200


class TestRng:
    """Tests for the seeded stream."""

    def test_reproducible(self):
        """Identical seeds reproduce identical draws."""
        assert np.array_equal(Rng(5).complex_normal(10), Rng(5).complex_normal(10))

    def test_negative_seed_rejected(self):
        """Seeds must be nonnegative."""
        with pytest.raises(ArgumentError):
            Rng(-1)

    def test_complex_normal_variance(self):
        """Real and imaginary parts each carry half the variance."""
        v = Rng(3).complex_normal(100000)
        assert abs(np.var(v.real) - 0.5) < 0.025
        assert abs(np.mean(np.abs(v) ** 2) - 1.0) < 0.05

    def test_spawn_is_deterministic(self):
        """Child streams depend only on the parent seed and the key."""
        a = Rng(11).spawn("init").normal(4)
        b = Rng(11).spawn("init").normal(4)
        c = Rng(11).spawn("other").normal(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestDistance:
    """Tests for phase-invariant distance."""

    def test_global_phase_is_free(self):
        """x and e^{i phi} x are at distance zero."""
        x = Rng(1).complex_normal(16)
        assert dist_up_to_phase(x, np.exp(0.7j) * x) < 1e-12

    def test_distance_to_zero(self):
        """dist(x, 0) = ||x||."""
        x = Rng(2).complex_normal(5)
        assert dist_up_to_phase(x, np.zeros(5)) == pytest.approx(np.linalg.norm(x))

    def test_closed_form(self):
        """Agrees with sqrt(|x|^2 + |z|^2 - 2|<x, z>|)."""
        stream = Rng(3)
        x, z = stream.complex_normal(9), stream.complex_normal(9)
        closed = np.sqrt(np.linalg.norm(x) ** 2 + np.linalg.norm(z) ** 2 - 2 * abs(np.vdot(x, z)))
        assert dist_up_to_phase(x, z) == pytest.approx(closed, rel=1e-10)

    def test_align_phase(self):
        """Aligned z matches x exactly for a pure phase."""
        x = Rng(4).complex_normal(6)
        aligned = align_phase(x, np.exp(-1.3j) * x)
        assert np.allclose(aligned, x, atol=1e-12)
        assert abs(optimal_phase(x, np.zeros(6)) - 1.0) == 0.0

    def test_relative_error(self):
        """Relative error is dist / ||x|| and rejects zero x."""
        x = np.array([3.0, 4.0], dtype=complex)
        assert relative_error(x, np.zeros(2)) == pytest.approx(1.0)
        with pytest.raises(ArgumentError):
            relative_error(np.zeros(2), x)

    def test_length_mismatch(self):
        """Vectors of different lengths are rejected."""
        with pytest.raises(ArgumentError):
            dist_up_to_phase(np.ones(3), np.ones(4))

    def test_as_complex_vector(self):
        """Non-finite and multi-dimensional input is rejected."""
        with pytest.raises(ArgumentError):
            as_complex_vector([1.0, np.nan])
        with pytest.raises(ArgumentError):
            as_complex_vector(np.ones((2, 2)))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6),
           st.floats(min_value=-np.pi, max_value=np.pi))
    def test_phase_invariance_property(self, seed, phi):
        """dist(x, e^{i phi} z) = dist(x, z) <= ||x - z||."""
        stream = Rng(seed)
        x, z = stream.complex_normal(7), stream.complex_normal(7)
        d = dist_up_to_phase(x, z)
        assert dist_up_to_phase(x, np.exp(1j * phi) * z) == pytest.approx(d, rel=1e-9, abs=1e-12)
        assert d <= np.linalg.norm(x - z) + 1e-12


class TestLeadingEigvec:
    """Tests for the power-iteration eigensolver."""

    def test_matches_dense_solver(self):
        """Eigenpair agrees with scipy.linalg.eigh on a Hermitian PSD matrix."""
        q = _unitary(8, 21)
        spectrum = np.array([10.0, 5.0, 3.0, 2.0, 1.0, 0.5, 0.2, 0.1])
        matrix = (q * spectrum) @ q.conj().T
        result = leading_eigvec(lambda v: matrix @ v, 8, rng=Rng(0))
        values, vectors = linalg.eigh(matrix)
        assert result.converged
        assert result.eigenvalue == pytest.approx(values[-1], rel=1e-8)
        assert abs(np.vdot(vectors[:, -1], result.vector)) == pytest.approx(1.0, abs=1e-8)

    def test_indefinite_operator(self):
        """The largest algebraic eigenvalue wins over a larger negative one."""
        matrix = np.diag([3.0, -10.0, 1.0, -2.0]).astype(complex)
        result = leading_eigvec(lambda v: matrix @ v, 4, rng=Rng(1))
        assert result.eigenvalue == pytest.approx(3.0, rel=1e-8)
        assert abs(result.vector[0]) == pytest.approx(1.0, abs=1e-6)

    def test_rank_one(self):
        """A rank-one operator e1 e1* returns e1 up to phase."""
        e1 = np.zeros(5, dtype=complex)
        e1[0] = 1.0
        result = leading_eigvec(lambda v: e1 * np.vdot(e1, v), 5, rng=Rng(2))
        assert abs(result.vector[0]) == pytest.approx(1.0, abs=1e-12)
        assert result.eigenvalue == pytest.approx(1.0)

    def test_zero_operator_is_degenerate(self):
        """The zero operator is flagged instead of raising."""
        result = leading_eigvec(lambda v: np.zeros_like(v), 3, rng=Rng(3))
        assert result.degenerate
        assert not result.converged

    def test_rayleigh_bound(self):
        """The eigenvalue dominates the Rayleigh quotient of random unit vectors."""
        stream = Rng(4)
        b = stream.complex_normal((12, 6))
        matrix = b.conj().T @ b
        result = leading_eigvec(lambda v: matrix @ v, 6, rng=Rng(5))
        for _ in range(20):
            u = stream.complex_normal(6)
            u /= np.linalg.norm(u)
            assert result.eigenvalue >= np.real(np.vdot(u, matrix @ u)) - 1e-8

    def test_invalid_arguments(self):
        """Dimension and tolerance are validated."""
        with pytest.raises(ArgumentError):
            leading_eigvec(lambda v: v, 0)
        with pytest.raises(ArgumentError):
            leading_eigvec(lambda v: v, 2, tol=0.0)
