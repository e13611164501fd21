"""
Deterministic seeded random streams.

Every stream is numpy's PCG64 bit generator seeded with a 64-bit integer, which
produces the same sequence on every platform. Derived seeds (per trial, per
signal) are obtained with ``numpy.random.SeedSequence`` hashing so that sweeps
can run on any number of workers and still draw identical data.
"""

from typing import List, Union

import numpy as np

from .errors import ArgumentError

SEED_MASK = (1 << 64) - 1

SeedPart = Union[int, float, str]

_WORD_MASK = (1 << 32) - 1
_TAG_INT, _TAG_FLOAT, _TAG_STR = 1, 2, 3


def _split64(value: int) -> List[int]:
    return [value & _WORD_MASK, (value >> 32) & _WORD_MASK]


def _entropy_words(part: SeedPart) -> List[int]:
    """
    Encode one seed component as tagged 32-bit words.

    Each component is prefixed by its type tag, and strings carry their byte
    length, so distinct component lists never share an encoding.
    """
    if isinstance(part, bool):
        return [_TAG_INT, *_split64(int(part))]
    if isinstance(part, int):
        return [_TAG_INT, *_split64(part & SEED_MASK)]
    if isinstance(part, float):
        # bit pattern of the float64, so 6.0 and 6.000001 never collide
        return [_TAG_FLOAT, *_split64(int(np.array([part], dtype="<f8").view("<u8")[0]))]
    if isinstance(part, str):
        raw = part.encode("utf-8")
        padded = raw.ljust(-(-len(raw) // 4) * 4, b"\0")
        return [_TAG_STR, len(raw), *np.frombuffer(padded, dtype="<u4").tolist()]
    raise ArgumentError(f"Unsupported seed component: {part!r}")


def derive_seed(*parts: SeedPart) -> int:
    """
    Mix seed components into one 64-bit seed.

    Args:
        parts: base seed followed by any identifying components
            (sweep variable, sweep value, trial index, ...)

    Returns:
        64-bit unsigned seed
    """
    words = [word for part in parts for word in _entropy_words(part)]
    state = np.random.SeedSequence(entropy=words).generate_state(1, dtype=np.uint64)
    return int(state[0])


class Rng:
    """
    Single-owner random stream over PCG64.

    Rng instances are never shared between threads; derive a child seed instead.
    """

    algorithm = "PCG64"

    def __init__(self, seed: int):
        if seed < 0:
            raise ArgumentError(f"Seed must be nonnegative, got {seed}")
        self.seed = int(seed) & SEED_MASK
        self._generator = np.random.Generator(np.random.PCG64(self.seed))

    def normal(self, size=None, scale: float = 1.0) -> np.ndarray:
        return self._generator.normal(0.0, scale, size)

    def complex_normal(self, size, variance: float = 1.0) -> np.ndarray:
        """Circular complex Gaussian draws with E|v|^2 = variance."""
        scale = np.sqrt(variance / 2.0)
        real = self._generator.normal(0.0, scale, size)
        imag = self._generator.normal(0.0, scale, size)
        return real + 1j * imag

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None) -> np.ndarray:
        return self._generator.uniform(low, high, size)

    def random(self, size=None) -> np.ndarray:
        return self._generator.random(size)

    def integers(self, low: int, high: int, size=None) -> np.ndarray:
        return self._generator.integers(low, high, size)

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        return self._generator.choice(n, size=size, replace=replace)

    def spawn(self, *parts: SeedPart) -> "Rng":
        """Return an independent stream keyed on this stream's seed."""
        return Rng(derive_seed(self.seed, *parts))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, algorithm={self.algorithm})"
