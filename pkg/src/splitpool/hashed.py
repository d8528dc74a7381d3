"""Low-storage design: each (level, rep) block and final sequence is a PolyHash."""

from __future__ import annotations

from . import rng
from .design import TestAssignment, params_from_dict
from .gf import PolyHash, field_new, hash_new
from .params import ProblemParams


def default_r(k: int) -> int:
    """ceil(log2 k) + 3."""
    return max(0, (k - 1).bit_length()) + 3


class HashAssignment(TestAssignment):
    variant = "hashed"

    def __init__(self, params: ProblemParams, r: int, level_hashes: dict, final_hashes: list):
        self.params = params
        self.r = r
        self.level_hashes = level_hashes
        self.final_hashes = final_hashes

    @property
    def mults_per_eval(self) -> int:
        return self.r - 1

    def level_slots(self, level, rep, nodes):
        return self.level_hashes[(level, rep)].eval_many(nodes)

    def final_slots(self, seq, items):
        return self.final_hashes[seq].eval_many(items)

    @property
    def storage_bits(self) -> int:
        """Coefficient bits over all hash functions."""
        hashes = list(self.level_hashes.values()) + list(self.final_hashes)
        return sum(h.storage_bits for h in hashes)

    def __eq__(self, other):
        if not isinstance(other, HashAssignment):
            return NotImplemented
        return (self.params == other.params and self.r == other.r
                and self.level_hashes == other.level_hashes
                and self.final_hashes == other.final_hashes)

    __hash__ = None

    def to_json(self) -> dict:
        p = self.params
        return {
            "variant": self.variant,
            "params": p.to_dict(),
            "r": self.r,
            "t": p.t,
            "layout": p.layout.segments(),
            "levels": [{"level": level, "rep": rep, **h.to_json()}
                       for (level, rep), h in sorted(self.level_hashes.items())],
            "final": [{"sequence": s, **h.to_json()} for s, h in enumerate(self.final_hashes)],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "HashAssignment":
        params = params_from_dict(doc["params"])
        levels = {(e["level"], e["rep"]): PolyHash.from_json(e) for e in doc["levels"]}
        final = [PolyHash.from_json(e) for e in doc["final"]]
        return cls(params, doc["r"], levels, final)


def build_hash_assignment(params: ProblemParams, r: int | None = None) -> HashAssignment:
    """One independent hash per (level, rep) and per final sequence.

    Level blocks use GF(2^m) with m = max(level, log2(C*k)) so that every node
    index is a distinct field point; final sequences use m = max(log2 n,
    log2(2k)).  Outputs are truncated to log2 of the block size.
    """
    p = params
    if r is None:
        r = default_r(p.k)
    if r < 2:
        raise ValueError(f"r must be at least 2, got {r}")
    block_bits = p.block_size.bit_length() - 1
    final_bits = p.final_block.bit_length() - 1
    levels = {}
    for level in range(p.ell_min, p.ell_max):
        f = field_new(max(level, block_bits))
        for rep in range(p.Ctil):
            stream = rng.SplitMix64(rng.derive_key(p.seed, rng.HASH_LEVEL, level, rep))
            levels[(level, rep)] = hash_new(f, r, block_bits, stream)
    f = field_new(max(p.log_n, final_bits))
    final = [hash_new(f, r, final_bits, rng.SplitMix64(rng.derive_key(p.seed, rng.HASH_FINAL, s)))
             for s in range(p.final_sequences)]
    return HashAssignment(p, r, levels, final)

