"""Exact and Monte-Carlo checks of the tree-size bounds behind the decoder.

Two tree models appear here.  In the branching model every reached node is
marked 1 with probability q, and a marked node reaches both children; N is
the total number of reached nodes (the root always counts).  In the
finite-height model N_h counts the leaves of a height-h tree joined to the
root by a path of marked nodes, endpoints included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import ProblemParams


@dataclass
class CheckReport:
    check: str
    bound: float
    observed: float
    stderr: float | None
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {"check": self.check, "bound": self.bound, "observed": self.observed,
               "stderr": self.stderr, "pass": bool(self.passed)}
        if self.details:
            doc["details"] = self.details
        return doc


def _logsumexp(x: np.ndarray) -> float:
    if x.size == 0:
        return -math.inf
    m = float(np.max(x))
    if m == -math.inf:
        return m
    return m + math.log(float(np.sum(np.exp(x - m))))


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


# ---------------------------------------------------------------- branching


@dataclass
class BranchPmf:
    q: float
    pmf: np.ndarray  # pmf[n] = P[N = n]; pmf[0] = 0
    tail_mass: float


LOG_SPACE_ABOVE = 60


def branching_pmf_exact(q: float, n_max: int) -> BranchPmf:
    """P[N = n] = (1/n) C(n, (n-1)/2) (1-q)^((n+1)/2) q^((n-1)/2) for odd n, else 0.

    This is the total-progeny law of a process whose nodes have 0 children
    w.p. 1-q and 2 children w.p. q.
    """
    if not 0 <= q < 0.5:
        raise ValueError(f"need 0 <= q < 1/2 for almost-sure extinction, got q={q}")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    pmf = np.zeros(n_max + 1)
    for n in range(1, n_max + 1, 2):
        half = (n - 1) // 2
        if half and q == 0:
            continue
        if n <= LOG_SPACE_ABOVE:
            pmf[n] = math.comb(n, half) * (1 - q) ** (half + 1) * q ** half / n
        else:
            log_c = math.lgamma(n + 1) - math.lgamma(half + 1) - math.lgamma(n - half + 1)
            pmf[n] = math.exp(log_c + (half + 1) * math.log1p(-q) + half * math.log(q) - math.log(n))
    return BranchPmf(q, pmf, 1.0 - float(pmf.sum()))


@dataclass
class BranchSample:
    q: float
    trials: int
    counts: np.ndarray  # counts[n] = trials with N = n (truncated trials excluded)
    truncated: int

    @property
    def pmf(self) -> np.ndarray:
        return self.counts / self.trials


def branching_simulate(q: float, depth_cap: int = 64, trials: int = 10**6,
                       seed: int = 0) -> BranchSample:
    """Simulate N generation by generation for all trials at once.

    A generation of size z has 2*Binomial(z, q) children.  Trials still
    alive after ``depth_cap`` generations are reported as truncated.
    """
    gen = np.random.default_rng(seed)
    pop = np.ones(trials, dtype=np.int64)
    total = np.zeros(trials, dtype=np.int64)
    for _ in range(depth_cap):
        total += pop
        if not pop.any():
            break
        pop = 2 * gen.binomial(pop, q)
    alive = pop > 0
    counts = np.bincount(total[~alive], minlength=2)
    return BranchSample(q, trials, counts, int(alive.sum()))


def total_variation(empirical: np.ndarray, exact: np.ndarray, n_max: int) -> float:
    """Half the L1 distance over the support 1..n_max."""
    e = np.zeros(n_max + 1)
    x = np.zeros(n_max + 1)
    e[: min(len(empirical), n_max + 1)] = empirical[: n_max + 1]
    x[: min(len(exact), n_max + 1)] = exact[: n_max + 1]
    return 0.5 * float(np.abs(e[1:] - x[1:]).sum())


def branching_check(q: float = 1 / 16, n_max: int = 99, trials: int = 10**6,
                    tv_max_n: int = 15, seed: int = 0) -> list[CheckReport]:
    exact = branching_pmf_exact(q, n_max)
    n = np.arange(1, n_max + 1)
    bound = 2.0 ** -(n - 1)
    excess = exact.pmf[1:] / bound
    worst = int(n[np.argmax(excess)])
    reports = [CheckReport(
        "branching-pmf-bound", 1.0, float(excess.max()), None, bool(np.all(exact.pmf[1:] <= bound)),
        {"q": q, "n_max": n_max, "worst_n": worst, "observed_is": "max P[N=n] * 2^(n-1)"})]
    if trials:
        sample = branching_simulate(q, trials=trials, seed=seed)
        tv = total_variation(sample.pmf, exact.pmf, tv_max_n)
        reports.append(CheckReport(
            "branching-monte-carlo", 0.01, tv, None, tv < 0.01,
            {"q": q, "trials": trials, "tv_support": tv_max_n,
             "truncated": sample.truncated}))
    return reports


# ---------------------------------------------------------------- leaf paths


@dataclass
class LeafPmf:
    q: float
    h: int
    pmf: np.ndarray  # pmf[t] = P[N_h = t], t = 0 .. 2^h
    log_pmf: np.ndarray

    def log_tail(self) -> np.ndarray:
        """log P[N_h >= t] for t = 0 .. 2^h."""
        return np.logaddexp.accumulate(self.log_pmf[::-1])[::-1]


MAX_LEAF_HEIGHT = 12


def _log_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    flipped = a[:, None] + b[None, ::-1]
    nb = len(b)
    return np.array([_logsumexp(np.diagonal(flipped, offset=nb - 1 - s))
                     for s in range(len(a) + nb - 1)])


def leaf_pmf_exact(q: float, h: int) -> LeafPmf:
    """Distribution of N_h via D_h = (1-q) delta_0 + q (D_{h-1} * D_{h-1}).

    D_0 is 1 w.p. q and 0 otherwise.  The recursion is run twice: in double
    precision and in log space, the latter keeping tiny tail terms exact.
    """
    if not 0 <= q <= 1:
        raise ValueError(f"q must be a probability, got {q}")
    if not 0 <= h <= MAX_LEAF_HEIGHT:
        raise ValueError(f"height must be in [0, {MAX_LEAF_HEIGHT}], got {h}")
    lq, l1q = _log(q), _log(1 - q)
    pmf = np.array([1 - q, q])
    log_pmf = np.array([l1q, lq])
    for _ in range(h):
        conv = q * np.convolve(pmf, pmf)
        conv[0] += 1 - q
        pmf = conv
        lconv = lq + _log_convolve(log_pmf, log_pmf)
        lconv[0] = np.logaddexp(lconv[0], l1q)
        log_pmf = lconv
    return LeafPmf(q, h, pmf, log_pmf)


def leaf_tail_check(q: float = 1 / 12, h_max: int = 10) -> CheckReport:
    """P[N_h >= t] <= 4^-(h+t) for 1 <= h <= h_max, 1 <= t <= 2^h (log space)."""
    worst = -math.inf
    where = None
    ok = True
    log4 = math.log(4)
    for h in range(1, h_max + 1):
        tail = leaf_pmf_exact(q, h).log_tail()
        t = np.arange(1, 2**h + 1)
        gap = tail[1:] + (h + t) * log4  # log(P / bound)
        i = int(np.argmax(gap))
        if gap[i] > worst:
            worst, where = float(gap[i]), (h, int(t[i]))
        ok &= bool(np.all(gap <= 1e-12))
    return CheckReport("leaf-tail", 1.0, math.exp(worst), None, ok,
                       {"q": q, "h_max": h_max, "worst_h_t": where,
                        "observed_is": "max P[N_h >= t] * 4^(h+t)"})


def leaf_mgf_check(q: float = 1 / 12, h_max: int = 10, lam: float = math.log(2)) -> list[CheckReport]:
    """E[exp(lam N_h)] <= 1 + 4^-h per height, and the product over heights <= 2."""
    per_h = []
    ok = True
    log_total = 0.0
    for h in range(1, h_max + 1):
        lp = leaf_pmf_exact(q, h)
        log_mgf = _logsumexp(lp.log_pmf + lam * np.arange(len(lp.log_pmf)))
        excess = math.expm1(log_mgf) * 4.0**h  # (E[exp(lam N_h)] - 1) / 4^-h
        log_total += log_mgf
        per_h.append({"h": h, "mgf": math.exp(log_mgf), "excess_ratio": excess})
        ok &= excess <= 1.0
    total = math.exp(log_total)
    return [
        CheckReport("leaf-mgf", 1.0, max(r["excess_ratio"] for r in per_h), None, ok,
                    {"q": q, "lambda": lam, "per_height": per_h,
                     "observed_is": "max (E[exp(lam N_h)] - 1) * 4^h"}),
        CheckReport("leaf-mgf-sum", 2.0, total, None, total <= 2.0,
                    {"q": q, "lambda": lam, "h_max": h_max}),
    ]


# ---------------------------------------------------------------- decoder means


def _mean_se(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=float)
    se = float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else math.inf
    return float(a.mean()), se


def mean_bounds_mc(params: ProblemParams, trials: int = 1000, seed: int = 0) -> list[CheckReport]:
    """Mean reached non-defective nodes (all levels) and leaves vs 6k log2(n/k) and 6k.

    A bound passes when the empirical mean plus three standard errors stays
    below it.
    """
    from .experiments import run_trial

    if params.C < 4:
        raise ValueError("the mean bounds assume C >= 4")
    records = [run_trial(params, "explicit", i, seed) for i in range(trials)]
    k, depth = params.k, params.log_n - params.log_k
    out = []
    for name, vals, bound in (
        ("mean-n-leaf", [r.n_leaf for r in records], 6 * k),
        ("mean-n-total", [r.n_total for r in records], 6 * k * depth),
    ):
        mean, se = _mean_se(vals)
        out.append(CheckReport(name, float(bound), mean, se, mean + 3 * se <= bound,
                               {"n": params.n, "k": k, "C": params.C, "trials": trials}))
    return out


def leaf_tail_fraction(params: ProblemParams, trials: int, seed: int, factor: int = 24) -> float:
    """Fraction of explicit trials whose PD leaf count exceeds factor*k."""
    from .experiments import run_trial

    hits = sum(run_trial(params, "explicit", i, seed).n_leaf_pd > factor * params.k
               for i in range(trials))
    return hits / trials


@dataclass
class HashedPdReport:
    report: CheckReport
    level_means: dict
    level_vars: dict
    discarded: int


def hashed_pd_mean_mc(params: ProblemParams, r: int, trials: int = 2000,
                      seed: int = 0) -> HashedPdReport:
    """Per-level mean count of non-defective PD nodes landing in positive tests.

    Only meaningful with a single repetition (then "survives" and "shares a
    test with a defective" coincide).  Trials in which some level holds more
    than 4k PD nodes are discarded and counted.
    """
    from .experiments import run_trial

    if params.C < 8 or params.Ctil != 1:
        raise ValueError("the hashed PD bound assumes C >= 8 and Ctil = 1")
    k = params.k
    levels = range(params.ell_min, params.ell_max)
    samples = {level: [] for level in levels}
    discarded = 0
    for i in range(trials):
        rec = run_trial(params, "hashed", i, seed, r=r)
        if max(rec.pd_per_level[level] for level in levels) > 4 * k:
            discarded += 1
            continue
        for level in levels:
            samples[level].append(rec.nondef_positive_per_level[level])
    means = {level: float(np.mean(v)) for level, v in samples.items()}
    var = {level: float(np.var(v, ddof=1)) for level, v in samples.items()}
    worst = max(means, key=means.get)
    _, se = _mean_se(samples[worst])
    rep = CheckReport("hashed-pd-mean", k / 2, means[worst], se,
                      all(m <= k / 2 for m in means.values()),
                      {"n": params.n, "k": k, "C": params.C, "r": r, "trials": trials,
                       "discarded": discarded, "worst_level": worst,
                       "level_means": means,
                       "var_over_k": {lv: v / k for lv, v in var.items()}})
    return HashedPdReport(rep, means, var, discarded)
