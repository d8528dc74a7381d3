"""Singleton-only SAFFRON, used as a baseline.

Each bundle has 2*log2(n) tests.  An item placed in a bundle joins the
first-half tests where its index has a 1 bit and the second-half tests where
its complement has a 1 bit.  A bundle decodes iff its two halves are exact
complements, which happens iff it holds exactly one defective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .outcomes import check_defectives
from .params import is_power_of_two


@dataclass(frozen=True)
class SaffronDesign:
    n: int
    k: int
    cb: int
    seed: int

    @property
    def word_bits(self) -> int:
        return self.n.bit_length() - 1

    @property
    def B(self) -> int:
        return self.cb * self.k * max(1, self.k.bit_length() - 1)

    @property
    def t(self) -> int:
        return 2 * self.B * self.word_bits

    def bundle_keys(self) -> np.ndarray:
        return rng.stream_block(rng.derive_key(self.seed, rng.SAFFRON), self.B)

    def membership(self, items) -> np.ndarray:
        """Bool matrix (B, len(items)): item j is in bundle b w.p. exactly 1/k."""
        words = rng.stream_at(self.bundle_keys(), np.asarray(items, dtype=np.int64))
        return (words & np.uint64(self.k - 1)) == 0


def build_saffron(n: int, k: int, cb: int = 8, seed: int = 0) -> SaffronDesign:
    if not is_power_of_two(n) or n < 2:
        raise ValueError(f"n must be a power of two >= 2, got {n}")
    if not is_power_of_two(k) or k > n:
        raise ValueError(f"k must be a power of two <= n, got {k}")
    if cb < 1:
        raise ValueError(f"cb must be positive, got {cb}")
    return SaffronDesign(n, k, cb, seed & rng.MASK64)


@dataclass(frozen=True, eq=False)
class SaffronOutcomes:
    """Per-bundle words: ``first[b]`` and ``second[b]`` are the two halves."""

    first: np.ndarray
    second: np.ndarray
    word_bits: int

    def to_bits(self) -> np.ndarray:
        """Flat test vector: bundle b, half h, bit j sits at 2*b*L + h*L + j."""
        L = self.word_bits
        shifts = np.arange(L, dtype=np.uint64)
        halves = np.stack([self.first, self.second], axis=1)
        return ((halves[:, :, None] >> shifts) & np.uint64(1)).astype(bool).reshape(-1)

    @classmethod
    def from_bits(cls, bits: np.ndarray, word_bits: int) -> "SaffronOutcomes":
        L = word_bits
        weights = np.uint64(1) << np.arange(L, dtype=np.uint64)
        halves = (bits.reshape(-1, 2, L).astype(np.uint64) * weights).sum(axis=2, dtype=np.uint64)
        return cls(halves[:, 0].copy(), halves[:, 1].copy(), L)


def simulate_saffron(design: SaffronDesign, S) -> SaffronOutcomes:
    """OR the codewords of the defectives present in each bundle.

    Only defectives' memberships are drawn, never the full item set.
    """
    S = check_defectives(S, design.n, design.n)
    full = np.uint64(design.n - 1)
    first = np.zeros(design.B, dtype=np.uint64)
    second = np.zeros(design.B, dtype=np.uint64)
    if S.size:
        inc = design.membership(S)
        items = S.astype(np.uint64)
        first = np.bitwise_or.reduce(np.where(inc, items[None, :], np.uint64(0)), axis=1)
        second = np.bitwise_or.reduce(np.where(inc, (~items & full)[None, :], np.uint64(0)), axis=1)
    return SaffronOutcomes(first.astype(np.uint64), second.astype(np.uint64), design.word_bits)


def simulate_saffron_naive(design: SaffronDesign, S) -> np.ndarray:
    """Flat test vector built test by test over all n items (small n only)."""
    S = set(int(s) for s in check_defectives(S, design.n, design.n))
    L = design.word_bits
    inc = design.membership(np.arange(design.n))
    bits = np.zeros(design.t, dtype=bool)
    for b in range(design.B):
        for item in np.flatnonzero(inc[b]):
            if int(item) not in S:
                continue
            for j in range(L):
                if (item >> j) & 1:
                    bits[2 * b * L + j] = True
                else:
                    bits[2 * b * L + L + j] = True
    return bits


def saffron_decode(design: SaffronDesign, outcomes: SaffronOutcomes) -> np.ndarray:
    """Union of the items named by bundles whose halves are complementary.

    One XOR and one compare per bundle.
    """
    full = np.uint64(design.n - 1)
    ok = (outcomes.first ^ outcomes.second) == full
    return np.unique(outcomes.first[ok].astype(np.int64))


def isolated_defectives(design: SaffronDesign, S) -> np.ndarray:
    """Defectives that are alone in at least one bundle."""
    S = check_defectives(S, design.n, design.n)
    if not S.size:
        return S
    inc = design.membership(S)
    alone = inc & (inc.sum(axis=1) == 1)[:, None]
    return S[alone.any(axis=0)]
