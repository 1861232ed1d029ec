"""Deterministic random number generation.

Datasets, weight initialization, and descent restarts must be bit-for-bit
reproducible across builds of this package, so randomness comes from a
small frozen generator rather than from whatever algorithm the host numpy
happens to ship: xoshiro256** seeded through splitmix64, uniform doubles
from the top 53 bits of one 64-bit word, and Gaussian deviates from the
Marsaglia polar transform with the spare deviate cached. Changing any of
these choices silently changes every generated artifact.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output word)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Rng:
    """xoshiro256** stream keyed by a 64-bit seed."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3", "_spare")

    def __init__(self, seed: int):
        state = int(seed) & _MASK64
        words = []
        for _ in range(4):
            state, w = _splitmix64(state)
            words.append(w)
        if not any(words):  # all-zero state would lock the generator
            words[0] = 1
        self._s0, self._s1, self._s2, self._s3 = words
        self._spare: float | None = None

    def next64(self) -> int:
        """One raw 64-bit output word."""
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def uniforms(self, lo: float, hi: float, shape) -> np.ndarray:
        """Array of independent uniforms, filled in C order."""
        size = int(np.prod(shape))
        out = np.empty(size, dtype=float)
        for i in range(size):
            out[i] = lo + (hi - lo) * self.random()
        return out.reshape(shape)

    def normal(self, mean: float = 0.0, std: float = 1.0) -> float:
        """Gaussian deviate via the polar transform (spare cached)."""
        if self._spare is not None:
            z = self._spare
            self._spare = None
        else:
            while True:
                u = 2.0 * self.random() - 1.0
                v = 2.0 * self.random() - 1.0
                s = u * u + v * v
                if 0.0 < s < 1.0:
                    break
            mult = math.sqrt(-2.0 * math.log(s) / s)
            z = u * mult
            self._spare = v * mult
        return mean + std * z

    def normals(self, mean: float, std: float, n: int) -> np.ndarray:
        return np.array([self.normal(mean, std) for _ in range(n)])

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % n)
        while True:
            r = self.next64()
            if r < limit:
                return r % n

    def shuffle(self, seq: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
