"""Command-line harness.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager

from . import bounds
from .design import build_explicit_assignment
from .experiments import VARIANTS, DEFAULT_CB, bench, run_trials, summarize, sweep, write_csv
from .gf import verify_rwise
from .hashed import build_hash_assignment, default_r
from .params import new_params

CHECKS = ("branching", "leaf-tail", "leaf-mgf", "mean-bounds", "hashed-pd", "rwise")


class UsageError(Exception):
    pass


def _add_problem_flags(p: argparse.ArgumentParser, n=1024, k=16) -> None:
    p.add_argument("--n", type=int, default=n)
    p.add_argument("--k", type=int, default=k)
    p.add_argument("--C", type=int, default=16)
    p.add_argument("--Cprime", type=int, default=3)
    p.add_argument("--Ctil", type=int, default=None, help="default 1 (explicit) or 2 (hashed)")
    p.add_argument("--variant", choices=VARIANTS, default="explicit")
    p.add_argument("--r", type=int, default=None, help="hash independence, default ceil(log2 k)+3")
    p.add_argument("--cb", type=int, default=DEFAULT_CB, help="SAFFRON bundles per k log k")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")


def _params(args):
    ctil = args.Ctil if args.Ctil is not None else (2 if args.variant == "hashed" else 1)
    try:
        return new_params(args.n, args.k, args.C, args.Cprime, ctil, args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from e


@contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="\n")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e
    with fh:
        yield fh


def cmd_design(args) -> int:
    if args.variant == "saffron":
        raise UsageError("design dumps exist for the explicit and hashed variants only")
    params = _params(args)
    if args.variant == "explicit":
        doc = build_explicit_assignment(params).to_json()
    else:
        doc = build_hash_assignment(params, args.r).to_json()
    with _output(args.out) as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return 0


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    params = _params(args)
    with _output(args.out) as fh:
        records = run_trials(params, args.variant, args.trials, args.seed, r=args.r, cb=args.cb)
        write_csv(fh, [(records, args.seed)])
    print(json.dumps(summarize(records)), file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    grid = {"n": args.n, "k": args.k, "C": args.C, "Cprime": args.Cprime,
            "Ctil": args.Ctil or [None], "variant": args.variant, "r": args.r or [None]}
    groups = []
    with _output(args.out) as fh:
        try:
            for cell, records in sweep(grid, args.trials, args.seed, cb=args.cb):
                groups.append((records, args.seed))
                print(json.dumps({**cell, **summarize(records)}), file=sys.stderr)
        except ValueError as e:
            raise UsageError(str(e)) from e
        write_csv(fh, groups)
    return 0


def _run_check(name: str, args) -> list:
    if name == "branching":
        q = 1 / 16 if args.q is None else args.q
        return bounds.branching_check(q, trials=args.trials if args.trials is not None else 10**6,
                                      seed=args.seed)
    if name == "leaf-tail":
        return [bounds.leaf_tail_check(1 / 12 if args.q is None else args.q, args.hmax)]
    if name == "leaf-mgf":
        return bounds.leaf_mgf_check(1 / 12 if args.q is None else args.q, args.hmax, args.lam)
    if name == "mean-bounds":
        params = new_params(args.n or 2**14, args.k or 64, args.C, 3, 1, args.seed)
        return bounds.mean_bounds_mc(params, args.trials or 1000, args.seed)
    if name == "hashed-pd":
        params = new_params(args.n or 2**12, args.k or 32, args.C, 3, 1, args.seed)
        return [bounds.hashed_pd_mean_mc(params, args.r or 8, args.trials or 2000, args.seed).report]
    if name == "rwise":
        m, r = args.m, args.r or 3
        reports = []
        for b in sorted({m, args.out_bits or m}):
            rep = verify_rwise(m, r, out_bits=b)
            reports.append(bounds.CheckReport(
                "rwise", rep.expected_count, rep.max_count, None, rep.passed,
                {"m": m, "r": r, "out_bits": b, "polynomials": rep.n_polys,
                 "min_count": rep.min_count, "distinct_tuples": rep.distinct_tuples}))
        return reports
    raise UsageError(f"unknown check {name!r}")


def cmd_verify(args) -> int:
    names = CHECKS if args.check == "all" else (args.check,)
    try:
        reports = [rep for name in names for rep in _run_check(name, args)]
    except ValueError as e:
        raise UsageError(str(e)) from e
    with _output(args.out) as fh:
        json.dump([r.to_json() for r in reports], fh, indent=1)
        fh.write("\n")
    return 0 if all(r.passed for r in reports) else 3


def cmd_bench(args) -> int:
    params = _params(args)
    report = bench(params, args.variant, args.warmup, args.iters, args.seed, r=args.r, cb=args.cb)
    with _output(args.out) as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splitpool", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="dump a design as JSON")
    _add_problem_flags(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="Monte-Carlo trials to CSV")
    _add_problem_flags(p)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="trials over a parameter grid")
    p.add_argument("--n", type=int, nargs="+", default=[2**14])
    p.add_argument("--k", type=int, nargs="+", default=[16, 32, 64])
    p.add_argument("--C", type=int, nargs="+", default=[16])
    p.add_argument("--Cprime", type=int, nargs="+", default=[3])
    p.add_argument("--Ctil", type=int, nargs="+", default=None)
    p.add_argument("--variant", choices=VARIANTS, nargs="+", default=["explicit"])
    p.add_argument("--r", type=int, nargs="+", default=None)
    p.add_argument("--cb", type=int, default=DEFAULT_CB)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run tree-size bound and hash-independence checks")
    p.add_argument("--check", choices=CHECKS + ("all",), default="all")
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--hmax", type=int, default=10)
    p.add_argument("--lam", type=float, default=math.log(2))
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--out-bits", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--C", type=int, default=16)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="median decode time")
    _add_problem_flags(p, n=2**20, k=256)
    p.add_argument("--warmup", type=int, default=2)
    p.add_argument("--iters", type=int, default=10)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"splitpool: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"splitpool: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
