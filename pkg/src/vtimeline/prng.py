"""Deterministic PRNG used for sampling plans and video-level splits.

SplitMix64 expands a 64-bit seed into the state of a xoshiro256** generator.
Both algorithms are tiny, public-domain, and specified bit-for-bit, so plans
and splits reproduce across languages and library versions. Python ints are
masked to 64 bits at every step.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

MASK64 = (1 << 64) - 1

T = TypeVar("T")


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a SplitMix64 state; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def fnv1a64(data: bytes | str) -> int:
    """FNV-1a 64-bit hash, used to fold string ids into seed material."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & MASK64
    return h


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** seeded from a single 64-bit value via SplitMix64."""

    def __init__(self, seed: int):
        state = seed & MASK64
        s = []
        for _ in range(4):
            state, out = splitmix64(state)
            s.append(out)
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias (rejection sampling)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (MASK64 + 1) - ((MASK64 + 1) % n)
        while True:
            draw = self.next_u64()
            if draw < limit:
                return draw % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_without_replacement(self, items: Sequence[T], k: int) -> list[T]:
        """Draw k distinct items; order of draws is the partial-shuffle order."""
        if k < 0:
            raise ValueError("k must be >= 0")
        pool = list(items)
        k = min(k, len(pool))
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


def derive_stream_seed(seed: int, *tokens: str) -> int:
    """Mix string tokens (e.g. a video id) into a base seed deterministically."""
    mixed = seed & MASK64
    for token in tokens:
        mixed ^= fnv1a64(token)
        _, mixed = splitmix64(mixed)
    return mixed
