"""Portable 64-bit PRNG used by the graph generators.

The generator is xoshiro256** whose four state words are filled with
successive SplitMix64 outputs starting from the user seed. Both algorithms
are the public-domain reference versions by Blackman and Vigna, so any
other implementation seeded the same way produces the same stream.

Derived draws:

* ``random()`` -- ``(next_u64() >> 11) * 2**-53``, a double in [0, 1).
* ``randbelow(n)`` -- rejection sampling: draw ``x = next_u64()`` until
  ``x < 2**64 - (2**64 % n)``, then return ``x % n``.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


class Xoshiro256StarStar:
    """xoshiro256** seeded through SplitMix64.

    Pass ``state`` to set the four state words directly (used to check the
    reference test vectors).
    """

    def __init__(self, seed: int = 0, *, state: tuple[int, int, int, int] | None = None):
        if state is None:
            sm = SplitMix64(seed)
            state = tuple(sm.next_u64() for _ in range(4))
        if not any(state):
            raise ValueError("xoshiro256** state must not be all zero")
        self.s = [w & MASK64 for w in state]

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n
