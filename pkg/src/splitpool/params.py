"""Problem parameters, the item tree, and the global test layout."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property


def is_power_of_two(x: int) -> bool:
    return x >= 1 and x & (x - 1) == 0


def next_power_of_two(x: int) -> int:
    return 1 if x <= 1 else 1 << (x - 1).bit_length()


@dataclass(frozen=True)
class Layout:
    """Where each block of tests lives in ``[0, t)``.

    Non-final levels come first in ascending order, repetitions ascending
    within a level, each block holding ``block`` tests.  The ``n_final``
    final-level sequences follow, ``final_block`` tests each.
    """

    ell_min: int
    ell_max: int
    ctil: int
    block: int
    n_final: int
    final_block: int

    @property
    def n_level_blocks(self) -> int:
        return (self.ell_max - self.ell_min) * self.ctil

    @property
    def final_start(self) -> int:
        return self.n_level_blocks * self.block

    @property
    def t(self) -> int:
        return self.final_start + self.n_final * self.final_block

    def level_offset(self, level: int, rep: int) -> int:
        if not self.ell_min <= level < self.ell_max or not 0 <= rep < self.ctil:
            raise IndexError(f"no test block for level={level}, rep={rep}")
        return ((level - self.ell_min) * self.ctil + rep) * self.block

    def final_offset(self, seq: int) -> int:
        if not 0 <= seq < self.n_final:
            raise IndexError(f"no final sequence {seq}")
        return self.final_start + seq * self.final_block

    def segments(self) -> list[dict]:
        """Layout table as plain records, in test-index order."""
        rows = []
        for level in range(self.ell_min, self.ell_max):
            for rep in range(self.ctil):
                rows.append({"kind": "level", "level": level, "rep": rep,
                             "offset": self.level_offset(level, rep), "length": self.block})
        for seq in range(self.n_final):
            rows.append({"kind": "final", "sequence": seq,
                         "offset": self.final_offset(seq), "length": self.final_block})
        return rows


@dataclass(frozen=True)
class ProblemParams:
    n: int
    k: int
    C: int
    Cprime: int
    Ctil: int
    seed: int
    requested_n: int
    requested_k: int

    @property
    def log_n(self) -> int:
        return self.n.bit_length() - 1

    @property
    def log_k(self) -> int:
        return self.k.bit_length() - 1

    @property
    def ell_min(self) -> int:
        return self.log_k

    @property
    def ell_max(self) -> int:
        return self.log_n

    @property
    def block_size(self) -> int:
        """Tests per (level, repetition) block: C*k."""
        return self.C * self.k

    @property
    def final_block(self) -> int:
        return 2 * self.k

    @property
    def final_sequences(self) -> int:
        # max(1, .) keeps k = 1 decodable; log k = 0 would leave no final tests
        return self.Cprime * max(1, self.log_k)

    @cached_property
    def layout(self) -> Layout:
        return Layout(self.ell_min, self.ell_max, self.Ctil, self.block_size,
                      self.final_sequences, self.final_block)

    @property
    def t(self) -> int:
        return self.layout.t

    def with_seed(self, seed: int) -> "ProblemParams":
        return ProblemParams(self.n, self.k, self.C, self.Cprime, self.Ctil, seed,
                             self.requested_n, self.requested_k)

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "C": self.C, "Cprime": self.Cprime,
                "Ctil": self.Ctil, "seed": self.seed,
                "requested_n": self.requested_n, "requested_k": self.requested_k}


def new_params(n: int, k: int, C: int = 16, Cprime: int = 3, Ctil: int = 1,
               seed: int = 0) -> ProblemParams:
    """Validate an instance and round it to the power-of-two grid.

    ``k`` is an upper bound on the number of defectives.  Both ``n`` and ``k``
    are rounded up to powers of two (extra items are dummy non-defectives),
    then ``k`` is clamped to ``n/2``.
    """
    if n < 2:
        raise ValueError(f"need at least 2 items, got n={n}")
    if k <= 0:
        raise ValueError(f"k must be positive, got k={k}")
    if not is_power_of_two(C):
        raise ValueError(f"C must be a power of two, got C={C}")
    if C < 4:
        raise ValueError(f"C must be at least 4, got C={C}")
    if Cprime < 1:
        raise ValueError(f"Cprime must be at least 1, got Cprime={Cprime}")
    if Ctil < 1:
        raise ValueError(f"Ctil must be at least 1, got Ctil={Ctil}")
    if C < 16:
        warnings.warn(f"C={C} < 16: not every tree-size bound applies", stacklevel=2)
    n_eff = next_power_of_two(n)
    k_eff = min(next_power_of_two(k), n_eff // 2)
    return ProblemParams(n_eff, k_eff, C, Cprime, Ctil, seed & ((1 << 64) - 1), n, k)


def num_tests(params: ProblemParams) -> int:
    """Ctil*C*k*log2(n/k) + 2k*F."""
    p = params
    return p.Ctil * p.C * p.k * (p.log_n - p.log_k) + 2 * p.k * p.final_sequences


@dataclass(frozen=True)
class TreeNode:
    level: int
    index: int

    def children(self) -> tuple["TreeNode", "TreeNode"]:
        return TreeNode(self.level + 1, 2 * self.index), TreeNode(self.level + 1, 2 * self.index + 1)

    def parent(self) -> "TreeNode":
        if self.level == 0:
            raise ValueError("the root has no parent")
        return TreeNode(self.level - 1, self.index // 2)


def group_of(node: TreeNode, params: ProblemParams) -> range:
    """Items covered by ``node``: ``[j*n/2^l, (j+1)*n/2^l)``."""
    if not 0 <= node.level <= params.log_n or not 0 <= node.index < (1 << node.level):
        raise ValueError(f"node {node} is outside the tree for n={params.n}")
    size = params.n >> node.level
    return range(node.index * size, (node.index + 1) * size)


def ancestor_node(item: int, level: int, params: ProblemParams) -> TreeNode:
    if not 0 <= item < params.n:
        raise ValueError(f"item {item} out of range for n={params.n}")
    if not params.ell_min <= level <= params.ell_max:
        raise ValueError(f"level {level} outside [{params.ell_min}, {params.ell_max}]")
    return TreeNode(level, item >> (params.log_n - level))
