"""Deterministic randomness.

The stream generator is xoshiro256** (Blackman & Vigna), seeded through
splitmix64, with doubles produced as ``(word >> 11) * 2**-53``.  All three
steps are exact integer/float operations, so the compiled and pure kernel
backends emit bitwise-identical streams.  Normal deviates use Box-Muller on
top of the uniform stream.
"""

import math

import numpy as np

from sigsal import kernels

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(counter):
    """One splitmix64 output for the given (already advanced) counter."""
    z = counter & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_subseed(seed, index):
    """Deterministic child seed for trial/layer ``index`` under ``seed``."""
    return _splitmix64(int(seed) + (int(index) + 1) * _GOLDEN)


class Xoshiro256(object):
    """xoshiro256** stream with uniform/normal/index-sampling draws."""

    def __init__(self, seed):
        seed = int(seed) & _MASK
        state = [_splitmix64(seed + (i + 1) * _GOLDEN) for i in range(4)]
        if not any(state):
            state[0] = 1  # all-zero state is a fixed point of xoshiro
        self._state = state

    def next_word(self):
        """Next raw 64-bit output."""
        s0, s1, s2, s3 = self._state
        result = (s1 * 5) & _MASK
        result = ((((result << 7) | (result >> 57)) & _MASK) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        self._state = [s0, s1, s2, s3]
        return result

    def random(self):
        """One double in [0, 1)."""
        return (self.next_word() >> 11) * 2.0 ** -53

    def uniform(self, size):
        """Array of doubles in [0, 1)."""
        out = np.empty(int(size), dtype=np.float64)
        state = np.array(self._state, dtype=np.uint64)
        kernels.xoshiro_fill(state, out)
        self._state = [int(w) for w in state]
        return out

    def normal(self, size):
        """Standard normal deviates via Box-Muller."""
        size = int(size)
        pairs = (size + 1) // 2
        u1 = 1.0 - self.uniform(pairs)  # (0, 1], keeps log finite
        u2 = self.uniform(pairs)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = (2.0 * math.pi) * u2
        z = np.empty(2 * pairs, dtype=np.float64)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return z[:size]

    def integers_below(self, bound):
        """Unbiased integer in [0, bound) by rejection."""
        bound = int(bound)
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = (1 << 64) - ((1 << 64) % bound)
        while True:
            w = self.next_word()
            if w < threshold:
                return w % bound

    def sample_without_replacement(self, n, k):
        """k distinct indices drawn from range(n), partial Fisher-Yates."""
        n, k = int(n), int(k)
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = np.arange(n, dtype=np.int64)
        for i in range(k):
            j = i + self.integers_below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k].copy()
