"""Deterministic 64-bit PRNG (splitmix64) with Box-Muller gaussians.

Pinned bit-for-bit so independently written implementations can reproduce
the exact same synthetic datasets and weight initializations:

* state' = state + 0x9E3779B97F4A7C15 (mod 2^64), output = splitmix64
  finalizer of state'.
* uniform() = ((u64 >> 11) + 0.5) * 2^-53, strictly inside (0, 1).
* gaussian() consumes exactly two uniforms u1, u2 and returns
  sqrt(-2 ln u1) * cos(2 pi u2); the sine variate is discarded so the
  generator state stays a single 64-bit word.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO53 = float(1 << 53)


class Prng:
    """splitmix64 stream seeded with a 64-bit unsigned integer."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in the open interval (0, 1)."""
        return ((self.next_u64() >> 11) + 0.5) / _TWO53

    def uniform_in(self, low: float, high: float) -> float:
        return low + self.uniform() * (high - low)

    def gaussian(self) -> float:
        """Standard normal variate via Box-Muller (two uniforms per call)."""
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
