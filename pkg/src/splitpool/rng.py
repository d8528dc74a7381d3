"""SplitMix64 streams used for every random choice in a design.

Every stream is counter based: output ``i`` of the stream with key ``key`` is
``mix64(key + (i + 1) * GAMMA)``.  This is the classic SplitMix64 sequence
started from state ``key``, so a whole block can be produced with numpy
without stepping a generator, and any single slot can be recomputed in O(1).
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# Domain tags separating the substreams of one master seed.
LEVEL = 1
FINAL = 2
HASH_LEVEL = 3
HASH_FINAL = 4
SAFFRON = 5
TRIAL = 6
SUBSET = 7


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_key(seed: int, *parts: int) -> int:
    """Key of the substream identified by ``parts`` under ``seed``."""
    h = mix64(seed + GAMMA)
    for p in parts:
        h = mix64((h ^ (p & MASK64)) + GAMMA)
    return h


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(_M1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_M2)
        z ^= z >> np.uint64(31)
    return z


def stream_block(keys, count: int, start: int = 0) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of one or several streams.

    ``keys`` may be a scalar (returns shape ``(count,)``) or a sequence of
    keys (returns shape ``(len(keys), count)``).
    """
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    scalar = np.ndim(keys) == 0
    k = np.atleast_1d(np.asarray(keys, dtype=np.uint64))
    with np.errstate(over="ignore"):
        z = k[:, None] + counters[None, :] * np.uint64(GAMMA)
    out = mix64_array(z)
    return out[0] if scalar else out


def stream_at(keys: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Output ``positions[j]`` of stream ``keys[i]``, shape ``(len(keys), len(positions))``."""
    k = np.asarray(keys, dtype=np.uint64).reshape(-1, 1)
    pos = np.asarray(positions, dtype=np.uint64).reshape(1, -1)
    with np.errstate(over="ignore"):
        z = k + (pos + np.uint64(1)) * np.uint64(GAMMA)
    return mix64_array(z)


class SplitMix64:
    """Sequential view of a stream, for small draws (coefficients, subsets)."""

    def __init__(self, key: int):
        self.state = key & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def bits(self, nbits: int) -> int:
        """Uniform integer in ``[0, 2**nbits)`` from the low bits of one word."""
        return self.next_u64() & ((1 << nbits) - 1)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``; rejection keeps it unbiased."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        mask = (1 << (bound - 1).bit_length()) - 1
        while True:
            v = self.next_u64() & mask
            if v < bound:
                return v


def sample_subset(population: int, size: int, rng: SplitMix64) -> np.ndarray:
    """Sorted uniform ``size``-subset of ``range(population)``.

    Partial Fisher-Yates over a sparse swap table, so memory is O(size).
    """
    if not 0 <= size <= population:
        raise ValueError(f"cannot draw {size} items from {population}")
    swapped: dict[int, int] = {}
    picked = []
    for i in range(size):
        j = i + rng.below(population - i)
        picked.append(swapped.get(j, j))
        swapped[j] = swapped.get(i, i)
    return np.array(sorted(picked), dtype=np.int64)
