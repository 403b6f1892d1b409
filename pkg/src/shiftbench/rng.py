"""Deterministic pseudo-random generator used for every sampling decision.

All randomness in this package flows through the two generators below so that
identical seeds reproduce identical experiments regardless of platform or
implementation language. Both are defined by their integer recurrences; no
floating-point state is involved.

SplitMix64 (seed expansion, 64-bit output)::

    state is a u64, initialised to the seed
    next():
        state = (state + 0x9E3779B97F4A7C15) mod 2^64
        z = state
        z = ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
        z = ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
        return z XOR (z >> 31)

PCG32 (XSH-RR variant, 32-bit output, 64-bit state)::

    state, inc are u64; inc must be odd
    next_u32():
        old = state
        state = (old * 6364136223846793005 + inc) mod 2^64
        xorshifted = (((old >> 18) XOR old) >> 27) mod 2^32
        rot = old >> 59
        return (xorshifted >> rot) | (xorshifted << ((32 - rot) mod 32)) mod 2^32

Seeding from a single u64 seed: a SplitMix64 stream on the seed provides
``initstate`` then ``initseq``, and the PCG32 stream is initialised as in the
reference implementation: ``state = 0; inc = (initseq << 1) | 1; next_u32();
state += initstate; next_u32()``.

Derived quantities are defined exactly as:

* ``bounded(n)``: rejection sampling; ``threshold = (2^32 - n) mod n``; draw
  ``r = next_u32()`` until ``r >= threshold``; return ``r mod n``.
* ``uniform(lo, hi)``: ``lo + (hi - lo) * next_u32() / 2^32``.
* ``randint(lo, hi)``: ``lo + bounded(hi - lo + 1)``.
* ``choose_indices(n, k)`` (partial Fisher-Yates): start from ``idx = [0..n)``;
  for ``i`` in ``0..k``: ``j = i + bounded(n - i)``; swap ``idx[i], idx[j]``;
  return ``idx[:k]``.
* ``shuffle``: full Fisher-Yates via ``choose_indices(n, n)`` order.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
MASK32 = (1 << 32) - 1

_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MUL1 = 0xBF58476D1CE4E5B9
_SM_MUL2 = 0x94D049BB133111EB
_PCG_MULT = 6364136223846793005


class SplitMix64:
    """Seed-expansion stream; also used to derive per-stage sub-seeds."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next(self) -> int:
        self._state = (self._state + _SM_GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _SM_MUL1) & MASK64
        z = ((z ^ (z >> 27)) * _SM_MUL2) & MASK64
        return z ^ (z >> 31)


class Pcg32:
    """PCG32 XSH-RR stream. Construct via ``from_seed`` for the documented
    single-seed initialisation, or directly with (initstate, initseq)."""

    def __init__(self, initstate: int, initseq: int):
        self._state = 0
        self._inc = ((initseq << 1) | 1) & MASK64
        self.next_u32()
        self._state = (self._state + (initstate & MASK64)) & MASK64
        self.next_u32()

    @classmethod
    def from_seed(cls, seed: int) -> "Pcg32":
        sm = SplitMix64(seed)
        return cls(sm.next(), sm.next())

    def next_u32(self) -> int:
        old = self._state
        self._state = (old * _PCG_MULT + self._inc) & MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & MASK32

    def bounded(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("bounded() requires n >= 1")
        threshold = ((1 << 32) - n) % n
        while True:
            r = self.next_u32()
            if r >= threshold:
                return r % n

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * (self.next_u32() / 4294967296.0)

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi] inclusive."""
        if hi < lo:
            raise ValueError("randint() requires lo <= hi")
        return lo + self.bounded(hi - lo + 1)

    def choose_indices(self, n: int, k: int) -> list[int]:
        """First k slots of a Fisher-Yates shuffle of range(n), without
        replacement. Uniform over ordered k-subsets."""
        if not 0 <= k <= n:
            raise ValueError("choose_indices() requires 0 <= k <= n")
        idx = list(range(n))
        for i in range(k):
            j = i + self.bounded(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return idx[:k]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle (consumes n draws)."""
        n = len(items)
        for i in range(n):
            j = i + self.bounded(n - i)
            items[i], items[j] = items[j], items[i]
