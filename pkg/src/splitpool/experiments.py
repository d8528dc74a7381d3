"""Seeded Monte-Carlo trials, sweeps and decode benchmarks."""

from __future__ import annotations

import csv
import itertools
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .decoder import decode
from .design import build_explicit_assignment
from .hashed import build_hash_assignment, default_r
from .outcomes import simulate_fast
from .params import ProblemParams
from .saffron import build_saffron, saffron_decode, simulate_saffron

CSV_COLUMNS = ["trial", "n", "k", "C", "Cprime", "Ctil", "r", "variant", "t", "success",
               "n_total", "n_leaf_pd", "decode_ns", "seed"]
VARIANTS = ("explicit", "hashed", "saffron")
DEFAULT_CB = 8


@dataclass
class TrialRecord:
    trial: int
    n: int
    k: int
    C: int
    Cprime: int
    Ctil: int
    r: int
    variant: str
    t: int
    success: bool
    n_total: int | None
    n_leaf_pd: int | None
    decode_ns: int
    seed: int
    # not part of the CSV
    superset: bool = True
    n_leaf: int | None = None
    nodes_visited: int | None = None
    field_mults: int = 0
    n_defective: int = 0
    pd_per_level: list = field(default_factory=list, repr=False)
    nondef_positive_per_level: list = field(default_factory=list, repr=False)

    def csv_row(self) -> list:
        return [self.trial, self.n, self.k, self.C, self.Cprime, self.Ctil, self.r,
                self.variant, self.t, int(self.success),
                "" if self.n_total is None else self.n_total,
                "" if self.n_leaf_pd is None else self.n_leaf_pd,
                self.decode_ns, self.seed]


def trial_seed(master_seed: int, trial: int) -> int:
    return rng.derive_key(master_seed, rng.TRIAL, trial)


def draw_defectives(params: ProblemParams, seed: int) -> np.ndarray:
    """Uniform subset of the real (non-padding) items, of the requested size."""
    population = min(params.requested_n, params.n)
    size = min(params.requested_k, params.k)
    return rng.sample_subset(population, size, rng.SplitMix64(rng.derive_key(seed, rng.SUBSET)))


def run_trial(base: ProblemParams, variant: str, trial: int, master_seed: int,
              r: int | None = None, cb: int = DEFAULT_CB) -> TrialRecord:
    """Fresh design, fresh defective set, simulate, decode, compare.

    The design seed is derived from (master_seed, trial), so any trial can be
    replayed on its own.
    """
    seed = trial_seed(master_seed, trial)
    params = base.with_seed(seed)
    S = draw_defectives(params, seed)
    common = dict(trial=trial, n=params.n, k=params.k, C=params.C, Cprime=params.Cprime,
                  Ctil=params.Ctil, variant=variant, seed=seed, n_defective=int(S.size))
    if variant == "saffron":
        design = build_saffron(params.n, params.k, cb, seed)
        out = simulate_saffron(design, S)
        start = time.perf_counter_ns()
        est = saffron_decode(design, out)
        elapsed = time.perf_counter_ns() - start
        return TrialRecord(r=0, t=design.t, success=bool(np.array_equal(est, S)),
                           n_total=None, n_leaf_pd=None, decode_ns=elapsed,
                           superset=bool(np.isin(S, est).all()), **common)
    if variant == "explicit":
        assignment = build_explicit_assignment(params)
        r_used = 0
    elif variant == "hashed":
        r_used = default_r(params.k) if r is None else r
        assignment = build_hash_assignment(params, r_used)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    res = decode(assignment, simulate_fast(assignment, S), truth=S)
    return TrialRecord(
        r=r_used, t=params.t, success=bool(np.array_equal(res.estimate, S)),
        n_total=res.n_total, n_leaf_pd=res.n_leaf_pd, decode_ns=res.decode_ns,
        superset=bool(np.isin(S, res.estimate).all()), n_leaf=res.n_leaf,
        nodes_visited=res.nodes_visited, field_mults=res.field_mults,
        pd_per_level=res.pd_per_level,
        nondef_positive_per_level=res.nondef_positive_per_level, **common)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("SPLITPOOL_THREADS", "1")))
    except ValueError:
        return 1


def _run_one(args):
    return run_trial(*args)


def run_trials(base: ProblemParams, variant: str, trials: int, master_seed: int,
               r: int | None = None, cb: int = DEFAULT_CB, workers: int | None = None) -> list[TrialRecord]:
    """Records ordered by trial id, whatever the worker count."""
    workers = worker_count() if workers is None else workers
    jobs = [(base, variant, i, master_seed, r, cb) for i in range(trials)]
    if workers <= 1 or trials < 2:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs, chunksize=max(1, trials // (4 * workers))))


def summarize(records: list[TrialRecord]) -> dict:
    def mean(vals):
        vals = [v for v in vals if v is not None]
        return statistics.fmean(vals) if vals else None

    return {
        "trials": len(records),
        "error_rate": 1 - statistics.fmean(r.success for r in records) if records else None,
        "superset_rate": statistics.fmean(r.superset for r in records) if records else None,
        "mean_n_total": mean(r.n_total for r in records),
        "mean_n_leaf_pd": mean(r.n_leaf_pd for r in records),
        "median_decode_ns": statistics.median(r.decode_ns for r in records) if records else None,
    }


def summary_row(records: list[TrialRecord], master_seed: int) -> list:
    """CSV row labelled ``summary``: success column holds the success rate."""
    s = summarize(records)
    first = records[0]
    return ["summary", first.n, first.k, first.C, first.Cprime, first.Ctil, first.r,
            first.variant, first.t, f"{1 - s['error_rate']:.6f}",
            "" if s["mean_n_total"] is None else f"{s['mean_n_total']:.3f}",
            "" if s["mean_n_leaf_pd"] is None else f"{s['mean_n_leaf_pd']:.3f}",
            int(s["median_decode_ns"]), master_seed]


def write_csv(fh, groups: list[tuple[list[TrialRecord], int]]) -> None:
    """Header, then each group's trial rows followed by its summary row."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for records, master_seed in groups:
        for rec in records:
            w.writerow(rec.csv_row())
        if records:
            w.writerow(summary_row(records, master_seed))


def sweep(grid: dict, trials: int, master_seed: int, cb: int = DEFAULT_CB):
    """Run every cell of a grid; yields (cell, records) in grid order.

    ``grid`` maps n, k, C, Cprime, Ctil, variant, r to lists.  A Ctil of None
    picks 1 for explicit and 2 for hashed.
    """
    from .params import new_params

    keys = ["n", "k", "C", "Cprime", "Ctil", "variant", "r"]
    for values in itertools.product(*(grid[key] for key in keys)):
        cell = dict(zip(keys, values))
        ctil = cell["Ctil"] or (2 if cell["variant"] == "hashed" else 1)
        base = new_params(cell["n"], cell["k"], cell["C"], cell["Cprime"], ctil, master_seed)
        yield cell, run_trials(base, cell["variant"], trials, master_seed, r=cell["r"], cb=cb)


def bench(base: ProblemParams, variant: str, warmup: int, iters: int, master_seed: int,
          r: int | None = None, cb: int = DEFAULT_CB) -> dict:
    """Median decode time over ``iters`` fresh designs after ``warmup`` runs."""
    for i in range(warmup):
        run_trial(base, variant, i, master_seed ^ 0x5EED, r=r, cb=cb)
    recs = [run_trial(base, variant, i, master_seed, r=r, cb=cb) for i in range(iters)]
    out = {
        "variant": variant, "n": base.n, "k": base.k, "C": base.C, "Cprime": base.Cprime,
        "Ctil": base.Ctil, "r": recs[0].r, "t": recs[0].t, "iters": iters,
        "median_decode_ns": statistics.median(x.decode_ns for x in recs),
        "error_rate": 1 - statistics.fmean(x.success for x in recs),
    }
    if variant != "saffron":
        visited = [x.nodes_visited for x in recs]
        out["median_nodes_visited"] = statistics.median(visited)
        out["nodes_per_k_log"] = statistics.fmean(visited) / (base.k * (base.log_n - base.log_k))
    if variant == "hashed":
        out["median_field_mults"] = statistics.median(x.field_mults for x in recs)
    return out
