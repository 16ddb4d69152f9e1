"""SplitMix64, the PRNG behind every randomized law suite.

State update and output mix (all arithmetic mod 2**64)::

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

Bounded integers use rejection sampling on the top of the 64-bit range, so a
seed produces the same cases on every machine.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, TypeVar

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

T = TypeVar("T")


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK
        z = ((z ^ (z >> 27)) * MIX2) & MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def choice(self, items: Sequence[T]) -> T:
        return items[self.below(len(items))]

    def rational(self, num: int = 6, den: int = 6) -> Fraction:
        """p/q with |p| <= num, 1 <= q <= den."""
        return Fraction(self.randint(-num, num), self.randint(1, den))

    def unit_float(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def fork(self) -> SplitMix64:
        """An independent stream seeded from this one."""
        return SplitMix64(self.next_u64())
