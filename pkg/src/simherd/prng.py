"""Deterministic workspace PRNG: xoshiro256** with splitmix64 seeding.

Every stochastic draw in a workspace comes from one of these streams, so a
given seed fixes the whole simulation bit-for-bit. The algorithm is pinned
on purpose: xoshiro256** (Blackman & Vigna) for output, splitmix64 to expand
the user seed into the 256-bit state.

Derived draws, in terms of raw 64-bit outputs:

- ``random()``   -> one output; top 53 bits scaled by 2**-53.
- ``randbelow(n)`` -> unbiased rejection sampling: outputs are drawn until
  one falls below the largest multiple of n that fits in 64 bits, then
  reduced mod n. Bounds n <= 1 return 0 without consuming an output.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class Xoshiro256:
    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int = 0):
        self.seed(seed)

    def seed(self, seed: int) -> None:
        """Reset the stream from a 64-bit integer seed (any int accepted)."""
        x = seed & _MASK
        state = []
        for _ in range(4):
            x = (x + 0x9E3779B97F4A7C15) & _MASK
            z = x
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
            state.append(z ^ (z >> 31))
        self._s0, self._s1, self._s2, self._s3 = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        r = (s1 * 5) & _MASK
        out = (((r << 7) | (r >> 57)) & _MASK) * 9 & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return out

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * 1.1102230246251565e-16  # 2**-53

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n). n <= 1 returns 0 without drawing."""
        if n <= 1:
            return 0
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def getstate(self) -> tuple[int, int, int, int]:
        return (self._s0, self._s1, self._s2, self._s3)

    def setstate(self, state: tuple[int, int, int, int]) -> None:
        self._s0, self._s1, self._s2, self._s3 = state

    # __slots__ classes need explicit pickle support; workspace states (and
    # their streams) cross a process boundary between run chunks.
    def __getstate__(self):
        return self.getstate()

    def __setstate__(self, state):
        self.setstate(state)

    def __repr__(self) -> str:
        return f"Xoshiro256(state={self.getstate()})"
