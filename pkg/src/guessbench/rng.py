"""Portable seeded randomness.

Splits must reproduce bit-for-bit on any platform and in any language, so
the shuffle is built on SplitMix64 (Steele, Lea & Flood 2014), whose output
is fully specified by a handful of 64-bit integer operations. Seed 1234567
yields 6457827717110365317, 3203168211198807973, 9817491932198370423 as its
first three outputs.
"""
from __future__ import annotations

import hashlib

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        r = self.next_u64()
        while r >= limit:
            r = self.next_u64()
        return r % n


def permutation(n: int, seed: int) -> list[int]:
    """Fisher-Yates permutation of ``range(n)`` driven by SplitMix64.

    For ``i = n-1 .. 1`` swap position ``i`` with ``below(i + 1)``.
    """
    rng = SplitMix64(seed)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def derive_seed(root: int, label: str) -> int:
    """Fan a root seed out to an independent seed for a labeled purpose."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return (root ^ int.from_bytes(digest[:8], "little")) & MASK64
