"""Deterministic 64-bit random number generation.

Every random choice in this package flows through SplitMix64 so that a given
seed produces byte-identical output on any platform and Python build.  The
stdlib ``random`` module is deliberately not used for sampling: its Mersenne
Twister state is huge, and float-based choice helpers invite platform drift.

Update function (splitmix64): state advances by the 64-bit golden gamma
0x9E3779B97F4A7C15; the output is the new state passed through two
xor-shift-multiply rounds (constants 0xBF58476D1CE4E5B9, 0x94D049BB133111EB)
and a final 31-bit xor-shift.  All arithmetic is modulo 2**64.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

MASK64 = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

T = TypeVar("T")


def _scramble(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def mix(seed: int, *parts: int) -> int:
    """Derive a child seed from ``seed`` and integer context parts.

    Each part is folded in with xor, advanced by the splitmix gamma, and
    scrambled; the chain is order-sensitive, so mix(s, 1, 2) != mix(s, 2, 1).
    Used to give every (line, noise type, variant) its own stream without
    coordination between workers.
    """
    state = seed & MASK64
    for part in parts:
        state = _scramble(((state ^ (part & MASK64)) + _GAMMA) & MASK64)
    return state


class SplitMix64:
    """Sequential splitmix64 stream over a 64-bit state."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & MASK64
        return _scramble(self._state)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError(f"randrange bound must be positive, got {n}")
        limit = ((1 << 64) // n) * n
        while True:
            z = self.next_u64()
            if z < limit:
                return z % n

    def choice(self, seq: Sequence[T]) -> T:
        if not seq:
            raise ValueError("cannot choose from an empty sequence")
        return seq[self.randrange(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, iterating from the tail."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]
