"""Seeded random streams and mergeable Monte Carlo tallies."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_U64 = (1 << 64) - 1


class RngStream:
    """Deterministic stream keyed by a 64-bit seed and a path of 64-bit stream ids.

    Children derived with ``child(i)`` are statistically independent of each other
    and of the parent, so Monte Carlo trials can be assigned streams up front and
    aggregated in any order.
    """

    def __init__(self, seed: int, stream: int | tuple[int, ...] = 0):
        if not 0 <= seed <= _U64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        key = (stream,) if isinstance(stream, int) else tuple(stream)
        if any(not 0 <= s <= _U64 for s in key):
            raise ValueError("stream ids must be 64-bit unsigned integers")
        self.seed = seed
        self.key = key
        self.gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))

    def child(self, i: int) -> RngStream:
        return RngStream(self.seed, self.key + (i,))

    def random(self, size=None):
        return self.gen.random(size)

    def coin(self) -> int:
        return int(self.gen.integers(0, 2))

    def randbits(self, k: int) -> int:
        """Uniform integer in [0, 2^k)."""
        if k <= 0:
            return 0
        raw = int.from_bytes(self.gen.bytes((k + 7) // 8), "little")
        return raw >> (8 * ((k + 7) // 8) - k)

    def randbelow(self, n: int) -> int:
        """Exact uniform integer in [0, n) for any positive Python int."""
        if n <= 0:
            raise ValueError("n must be positive")
        if n <= 1 << 62:
            return int(self.gen.integers(0, n))
        k = n.bit_length()
        while True:
            x = self.randbits(k)
            if x < n:
                return x

    def geometric_half(self, size=None):
        """Pr[k] = 2^-k for k = 1, 2, ...; exact for k <= 53."""
        return self.gen.geometric(0.5, size)


@dataclass
class Tally:
    """Running (count, sum, sum of squares); ``merge`` is associative."""

    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    def add(self, x: float) -> None:
        self.count += 1
        self.total += x
        self.total_sq += x * x

    def merge(self, other: Tally) -> Tally:
        return Tally(self.count + other.count, self.total + other.total, self.total_sq + other.total_sq)

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else math.nan

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return math.nan
        var = (self.total_sq - self.total**2 / self.count) / (self.count - 1)
        return math.sqrt(max(var, 0.0) / self.count)
