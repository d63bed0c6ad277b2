"""Reproducible pseudo-random numbers.

All stochastic parts of the package draw from :class:`Xorshift64Star` so a run
can be replayed bit-for-bit from a single 64-bit seed.

Generator: xorshift64* (Vigna, 2016).  State update ``x ^= x >> 12;
x ^= x << 25; x ^= x >> 27`` followed by multiplication with
``0x2545F4914F6CDD1D`` modulo 2**64.  The user seed is first passed through
SplitMix64 (increment ``0x9E3779B97F4A7C15``, multipliers
``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``) so that small or zero seeds
still give a well-mixed, nonzero state.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
DEFAULT_SEED = 20240917

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_STAR = 0x2545F4914F6CDD1D


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *parts: int) -> int:
    """Fold integer ``parts`` into ``seed``; used to give each sample its own stream."""
    h = splitmix64(seed & MASK64)
    for p in parts:
        h = splitmix64(h ^ (p & MASK64))
    return h


class Xorshift64Star:
    """xorshift64* generator with a SplitMix64-scrambled seed."""

    def __init__(self, seed: int = DEFAULT_SEED):
        if seed < 0 or seed > MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._state = splitmix64(seed) or _GOLDEN

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self._state = x
        return (x * _STAR) & MASK64

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n
