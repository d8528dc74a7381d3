"""Level-by-level splitting decoder and a brute-force consistency oracle."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .design import TestAssignment
from .outcomes import Outcomes, check_defectives
from .params import TreeNode, group_of


@dataclass
class DecodeResult:
    """Estimate plus work counters.

    ``pd_per_level[l]`` is the size of the possibly-defective set at tree
    level ``l`` (zero below the starting level).  The ground-truth fields are
    filled only when the decoder is given the true defective set.
    """

    estimate: np.ndarray
    pd_per_level: list
    nodes_visited: int
    n_leaf_pd: int
    decode_ns: int
    slot_lookups: int
    field_mults: int
    n_total: int | None = None
    n_leaf: int | None = None
    nondef_pd_per_level: list | None = None
    nondef_positive_per_level: list | None = None
    frontier: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        doc = {
            "estimate": [int(x) for x in self.estimate],
            "pd_per_level": list(self.pd_per_level),
            "nodes_visited": self.nodes_visited,
            "n_leaf_pd": self.n_leaf_pd,
            "decode_ns": self.decode_ns,
        }
        if self.n_total is not None:
            doc.update(n_total=self.n_total, n_leaf=self.n_leaf)
        return doc


def decode(assignment: TestAssignment, outcomes: Outcomes, truth=None) -> DecodeResult:
    """Recover the defective set from non-adaptive outcomes.

    All 2^ell_min nodes of the starting level are possibly defective (PD).
    At each level a PD node survives iff every one of its Ctil tests is
    positive, and each survivor puts both children on the next level's PD
    list.  The estimate is the set of PD leaves that sit in no negative
    final-level test.

    ``truth`` (the real defective set) only feeds the instrumentation and is
    processed after the timed section.
    """
    p = assignment.params
    if outcomes.layout != assignment.layout:
        raise ValueError("outcomes were produced under a different test layout")
    bits = outcomes.bits
    lookups = 0

    start = time.perf_counter_ns()
    pd = np.arange(1 << p.ell_min, dtype=np.int64)
    frontier = []
    for level in range(p.ell_min, p.ell_max):
        frontier.append(pd)
        alive = pd
        for rep in range(p.Ctil):
            lookups += alive.size
            alive = alive[bits[assignment.level_tests(level, rep, alive)]]
        pd = np.empty(2 * alive.size, dtype=np.int64)
        pd[0::2] = 2 * alive
        pd[1::2] = 2 * alive + 1
    frontier.append(pd)
    cand = pd
    for seq in range(p.final_sequences):
        if not cand.size:
            break
        lookups += cand.size
        cand = cand[bits[assignment.final_tests(seq, cand)]]
    elapsed = time.perf_counter_ns() - start

    pd_per_level = [0] * p.ell_min + [int(a.size) for a in frontier]
    res = DecodeResult(
        estimate=cand,
        pd_per_level=pd_per_level,
        nodes_visited=sum(a.size for a in frontier),
        n_leaf_pd=int(frontier[-1].size),
        decode_ns=elapsed,
        slot_lookups=lookups,
        field_mults=lookups * assignment.mults_per_eval,
        frontier=frontier,
    )
    if truth is not None:
        _attach_truth(res, p, check_defectives(truth, p.n, p.n))
    return res


def _attach_truth(res: DecodeResult, p, S: np.ndarray) -> None:
    nondef_pd = [0] * p.ell_min
    nondef_pos = [0] * p.ell_min
    for i, level in enumerate(range(p.ell_min, p.ell_max + 1)):
        nodes = res.frontier[i]
        defective = np.isin(nodes, S >> (p.log_n - level))
        nondef_pd.append(int((~defective).sum()))
        if level < p.ell_max:
            # survivors are exactly the parents of the next level's PD nodes
            passed = np.isin(nodes, res.frontier[i + 1][0::2] >> 1)
            nondef_pos.append(int((passed & ~defective).sum()))
    res.nondef_pd_per_level = nondef_pd
    res.nondef_positive_per_level = nondef_pos
    res.n_total = sum(nondef_pd)
    res.n_leaf = nondef_pd[-1]


MAX_ORACLE_N = 32
MAX_ORACLE_K = 4


def item_test_masks(assignment: TestAssignment) -> list[int]:
    """For each item, the bitmask of every test it sits in.

    Membership comes from scanning groups, not from index shifts, so this is
    independent of the fast simulator.
    """
    p = assignment.params
    lay = p.layout
    masks = [0] * p.n
    for level in range(p.ell_min, p.ell_max):
        nodes = np.arange(1 << level, dtype=np.int64)
        for rep in range(p.Ctil):
            tests = assignment.level_tests(level, rep, nodes)
            for j in range(1 << level):
                for item in group_of(TreeNode(level, j), p):
                    masks[item] |= 1 << int(tests[j])
    items = np.arange(p.n, dtype=np.int64)
    for seq in range(lay.n_final):
        tests = assignment.final_tests(seq, items)
        for item in range(p.n):
            masks[item] |= 1 << int(tests[item])
    return masks


def exhaustive_consistent(assignment: TestAssignment, outcomes: Outcomes, k: int) -> list[tuple]:
    """Every set of at most ``k`` items whose outcomes equal ``outcomes``.

    Items sitting in some negative test cannot belong to any consistent set,
    so only the remaining candidates are enumerated.
    """
    p = assignment.params
    if p.n > MAX_ORACLE_N or not 0 <= k <= MAX_ORACLE_K:
        raise ValueError(f"oracle limited to n <= {MAX_ORACLE_N}, k <= {MAX_ORACLE_K}")
    if outcomes.layout != assignment.layout:
        raise ValueError("outcomes were produced under a different test layout")
    y = sum(1 << int(i) for i in np.flatnonzero(outcomes.bits))
    masks = item_test_masks(assignment)
    candidates = [i for i in range(p.n) if masks[i] & ~y == 0]
    found = []
    for size in range(k + 1):
        for combo in itertools.combinations(candidates, size):
            acc = 0
            for i in combo:
                acc |= masks[i]
            if acc == y:
                found.append(combo)
    return found
