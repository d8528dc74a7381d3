"""Test assignments: which test each tree node (or final-level item) joins.

The t x n design matrix is never built.  An assignment only answers "which
slot of block (level, rep) holds node j" and "which slot of final sequence s
holds item i"; the layout turns slots into global test indices.
"""

from __future__ import annotations

import base64

import numpy as np

from . import rng
from .params import Layout, ProblemParams, new_params


class TestAssignment:
    """Capability shared by the explicit and hashed designs."""

    __test__ = False  # keep pytest from collecting this as a test class

    variant = "abstract"
    params: ProblemParams

    @property
    def layout(self) -> Layout:
        return self.params.layout

    @property
    def mults_per_eval(self) -> int:
        """Field multiplications spent per slot lookup (0 for stored slots)."""
        return 0

    def level_slots(self, level: int, rep: int, nodes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def final_slots(self, seq: int, items: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def level_tests(self, level: int, rep: int, nodes: np.ndarray) -> np.ndarray:
        return self.layout.level_offset(level, rep) + self.level_slots(level, rep, nodes)

    def final_tests(self, seq: int, items: np.ndarray) -> np.ndarray:
        return self.layout.final_offset(seq) + self.final_slots(seq, items)

    def to_json(self) -> dict:
        raise NotImplementedError


def _pack_u32(a: np.ndarray) -> str:
    return base64.b64encode(np.asarray(a, dtype="<u4").tobytes()).decode("ascii")


def _unpack_u32(s: str) -> np.ndarray:
    return np.frombuffer(base64.b64decode(s), dtype="<u4").astype(np.uint32)


class ExplicitAssignment(TestAssignment):
    """Fully independent design with every slot stored.

    ``level_slots_table[(level, rep)]`` has one entry per node of the level;
    ``final_table`` has shape ``(F, n)``.
    """

    variant = "explicit"

    def __init__(self, params: ProblemParams, level_slots_table: dict, final_table: np.ndarray):
        self.params = params
        self.level_slots_table = level_slots_table
        self.final_table = final_table

    def level_slots(self, level, rep, nodes):
        return self.level_slots_table[(level, rep)][nodes].astype(np.int64)

    def final_slots(self, seq, items):
        return self.final_table[seq][items].astype(np.int64)

    @property
    def nbytes(self) -> int:
        return sum(a.nbytes for a in self.level_slots_table.values()) + self.final_table.nbytes

    def __eq__(self, other):
        if not isinstance(other, ExplicitAssignment):
            return NotImplemented
        return (self.params == other.params
                and self.level_slots_table.keys() == other.level_slots_table.keys()
                and all(np.array_equal(v, other.level_slots_table[key])
                        for key, v in self.level_slots_table.items())
                and np.array_equal(self.final_table, other.final_table))

    __hash__ = None

    def to_json(self) -> dict:
        p = self.params
        return {
            "variant": self.variant,
            "params": p.to_dict(),
            "t": p.t,
            "layout": p.layout.segments(),
            "levels": [{"level": level, "rep": rep, "slots": _pack_u32(a)}
                       for (level, rep), a in sorted(self.level_slots_table.items())],
            "final": [{"sequence": s, "slots": _pack_u32(self.final_table[s])}
                      for s in range(p.final_sequences)],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ExplicitAssignment":
        params = params_from_dict(doc["params"])
        levels = {(e["level"], e["rep"]): _unpack_u32(e["slots"]) for e in doc["levels"]}
        final = np.stack([_unpack_u32(e["slots"]) for e in doc["final"]])
        return cls(params, levels, final)


def params_from_dict(d: dict) -> ProblemParams:
    p = new_params(d["n"], d["k"], d["C"], d["Cprime"], d["Ctil"], d["seed"])
    if (p.n, p.k) != (d["n"], d["k"]):
        raise ValueError("dumped parameters are not on the power-of-two grid")
    return p


def build_explicit_assignment(params: ProblemParams) -> ExplicitAssignment:
    """Draw every slot uniformly, keyed by (seed, level, rep) and (seed, FINAL, seq).

    Ranges are powers of two, so slots are the masked low bits of SplitMix64
    outputs.  Storage is Theta(n log k) slot integers.
    """
    p = params
    try:
        levels = {}
        mask = np.uint64(p.block_size - 1)
        for level in range(p.ell_min, p.ell_max):
            for rep in range(p.Ctil):
                key = rng.derive_key(p.seed, rng.LEVEL, level, rep)
                levels[(level, rep)] = (rng.stream_block(key, 1 << level) & mask).astype(np.uint32)
        keys = [rng.derive_key(p.seed, rng.FINAL, s) for s in range(p.final_sequences)]
        final = (rng.stream_block(keys, p.n) & np.uint64(p.final_block - 1)).astype(np.uint32)
    except MemoryError as e:
        raise MemoryError(f"explicit design for n={p.n}, k={p.k} does not fit in memory") from e
    return ExplicitAssignment(p, levels, final)
