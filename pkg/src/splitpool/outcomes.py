"""Noiseless test outcomes: test i is positive iff it holds a defective item."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import TestAssignment
from .params import Layout


@dataclass(frozen=True, eq=False)
class Outcomes:
    bits: np.ndarray  # bool, one entry per test
    layout: Layout

    def __post_init__(self):
        if self.bits.shape != (self.layout.t,):
            raise ValueError(f"expected {self.layout.t} outcomes, got {self.bits.shape}")

    def __eq__(self, other):
        if not isinstance(other, Outcomes):
            return NotImplemented
        return self.layout == other.layout and np.array_equal(self.bits, other.bits)

    __hash__ = None

    @property
    def n_positive(self) -> int:
        return int(self.bits.sum())

    def words(self) -> np.ndarray:
        """Packed uint64 words; test i is bit i % 64 of word i // 64."""
        padded = np.zeros(-(-self.layout.t // 64) * 64, dtype=np.uint8)
        padded[: self.layout.t] = self.bits
        return np.packbits(padded, bitorder="little").view("<u8").astype(np.uint64)

    def to_hex(self) -> str:
        """Words in ascending order (most significant word last), 16 hex digits each."""
        return "".join(format(int(w), "016x") for w in self.words())

    @classmethod
    def from_hex(cls, text: str, layout: Layout) -> "Outcomes":
        n_words = -(-layout.t // 64)
        if len(text) != 16 * n_words:
            raise ValueError(f"expected {16 * n_words} hex digits, got {len(text)}")
        words = np.array([int(text[16 * i: 16 * i + 16], 16) for i in range(n_words)], dtype="<u8")
        bits = np.unpackbits(words.view(np.uint8), bitorder="little")
        if bits[layout.t:].any():
            raise ValueError("bits set beyond the last test")
        return cls(bits[: layout.t].astype(bool), layout)


def check_defectives(S, n: int, k: int) -> np.ndarray:
    """Defective sets must be strictly increasing, in range, and of size <= k."""
    arr = np.asarray(S, dtype=np.int64).reshape(-1)
    if arr.size > k:
        raise ValueError(f"{arr.size} defectives exceed the bound k={k}")
    if arr.size and (arr[0] < 0 or arr[-1] >= n):
        raise ValueError(f"defective items must lie in [0, {n})")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise ValueError("defective set must be sorted without duplicates")
    return arr


def simulate_fast(assignment: TestAssignment, S) -> Outcomes:
    """Mark only the tests that hold a defective's ancestor or the defective itself."""
    p = assignment.params
    S = check_defectives(S, p.n, p.k)
    bits = np.zeros(p.t, dtype=bool)
    if S.size:
        for level in range(p.ell_min, p.ell_max):
            nodes = S >> (p.log_n - level)
            for rep in range(p.Ctil):
                bits[assignment.level_tests(level, rep, nodes)] = True
        for seq in range(p.final_sequences):
            bits[assignment.final_tests(seq, S)] = True
    return Outcomes(bits, p.layout)


def simulate_naive(assignment: TestAssignment, S) -> Outcomes:
    """Reference path: every node and item is scanned.

    A test is positive iff the OR over everything placed in it of "group
    intersects S" is true.  Only meant for small n.
    """
    p = assignment.params
    S = check_defectives(S, p.n, p.k)
    is_def = np.zeros(p.n, dtype=bool)
    for s in S:
        is_def[s] = True
    lay = p.layout
    bits = np.zeros(p.t, dtype=bool)
    for level in range(p.ell_min, p.ell_max):
        group_hit = is_def.reshape(1 << level, p.n >> level).any(axis=1)
        all_nodes = np.arange(1 << level, dtype=np.int64)
        for rep in range(p.Ctil):
            slots = assignment.level_slots(level, rep, all_nodes)
            hits = np.bincount(slots, weights=group_hit, minlength=lay.block) > 0
            off = lay.level_offset(level, rep)
            bits[off: off + lay.block] = hits
    all_items = np.arange(p.n, dtype=np.int64)
    for seq in range(p.final_sequences):
        slots = assignment.final_slots(seq, all_items)
        hits = np.bincount(slots, weights=is_def, minlength=lay.final_block) > 0
        off = lay.final_offset(seq)
        bits[off: off + lay.final_block] = hits
    return Outcomes(bits, p.layout)
