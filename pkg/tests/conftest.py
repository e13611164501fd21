"""Shared fixtures for the rkld-wf test suite."""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

import numpy as np
import pytest

from rkldwf.core.rng import Rng
from rkldwf.models.generation import CorruptionSpec, ModelKind, generate_problem
from rkldwf.models.operators import DenseOperator

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIG_DIR = os.path.join(REPO_ROOT, "config")


def _wirtinger_fd(f, z, h=1e-6):
    """Central-difference Wirtinger gradient (df/dRe + i df/dIm) / 2."""
    z = np.asarray(z, dtype=np.complex128)
    grad = np.zeros_like(z)
    for j in range(z.shape[0]):
        e = np.zeros_like(z)
        e[j] = h
        d_re = (f(z + e) - f(z - e)) / (2 * h)
        d_im = (f(z + 1j * e) - f(z - 1j * e)) / (2 * h)
        grad[j] = 0.5 * (d_re + 1j * d_im)
    return grad


@pytest.fixture
def wirtinger_fd():
    """Finite-difference Wirtinger gradient oracle."""
    return _wirtinger_fd


@pytest.fixture
def rng():
    return Rng(12345)


@pytest.fixture
def small_dense():
    """Random 24 x 8 complex Gaussian operator with a ground truth."""
    stream = Rng(7)
    op = DenseOperator(stream.complex_normal((24, 8)))
    x = stream.complex_normal(8)
    return op, x


@pytest.fixture
def gaussian_problem():
    """Noiseless Gaussian instance, N = 32, alpha = 8."""
    stream = Rng(2024)
    x = stream.normal(32) + 1j * stream.normal(32)
    return generate_problem(ModelKind.GAUSSIAN, x, Rng(99), alpha=8.0, seed=99)


@pytest.fixture
def outlier_problem():
    """Gaussian instance with sparse outliers, N = 32, alpha = 8."""
    stream = Rng(2025)
    x = stream.normal(32) + 1j * stream.normal(32)
    corruption = CorruptionSpec(theta=10.0, rho=0.1)
    return generate_problem(ModelKind.GAUSSIAN, x, Rng(5), alpha=8.0, corruption=corruption, seed=5)


@pytest.fixture
def config_dir():
    return CONFIG_DIR
