import itertools
import math

import numpy as np
import pytest

from splitpool import bounds, new_params

from conftest import quiet_params


def enumerate_progeny(q, depth):
    """P[N = n] by walking every marking of a depth-limited tree."""
    out = {}

    def walk(frontier, total, prob, d):
        if not frontier:
            out[total] = out.get(total, 0) + prob
            return
        if d == depth:
            return
        for marks in itertools.product((0, 1), repeat=frontier):
            ones = sum(marks)
            walk(2 * ones, total + frontier, prob * q**ones * (1 - q) ** (frontier - ones), d + 1)

    walk(1, 0, 1.0, 0)
    return out


def test_branching_small_values():
    q = 0.2
    pmf = bounds.branching_pmf_exact(q, 9).pmf
    assert pmf[1] == pytest.approx(1 - q)
    assert pmf[3] == pytest.approx(q * (1 - q) ** 2)
    assert pmf[2] == pmf[4] == 0
    walked = enumerate_progeny(q, 4)
    for n in (1, 3, 5, 7):
        assert pmf[n] == pytest.approx(walked[n], rel=1e-12)


def test_branching_degenerate():
    pmf = bounds.branching_pmf_exact(0.0, 20).pmf
    assert pmf[1] == 1 and pmf[2:].sum() == 0
    sample = bounds.branching_simulate(0.0, trials=1000)
    assert sample.counts[1] == 1000
    with pytest.raises(ValueError):
        bounds.branching_pmf_exact(0.5, 10)


def test_branching_pmf_sums_to_one():
    pmf = bounds.branching_pmf_exact(1 / 16, 999)
    assert abs(pmf.tail_mass) < 1e-12
    assert np.all((pmf.pmf >= 0) & (pmf.pmf <= 1))


def test_branching_check_flags_large_q():
    bound = bounds.branching_check(0.3, trials=0)[0]
    assert not bound.passed


def test_leaf_h1():
    q = 1 / 12
    lp = bounds.leaf_pmf_exact(q, 1)
    assert lp.pmf[2] == pytest.approx(q**3)
    assert lp.pmf[1:].sum() <= 2 * q**2


def leaf_brute(q, h):
    """Enumerate every marking of a complete height-h tree."""
    nodes = 2 ** (h + 1) - 1
    pmf = np.zeros(2**h + 1)
    for marks in itertools.product((0, 1), repeat=nodes):
        ones = sum(marks)
        prob = q**ones * (1 - q) ** (nodes - ones)
        # heap order: node i has children 2i+1, 2i+2; leaves are the last 2^h
        reach = [False] * nodes
        reach[0] = marks[0] == 1
        for i in range(1, nodes):
            reach[i] = reach[(i - 1) // 2] and marks[i] == 1
        pmf[sum(reach[nodes - 2**h:])] += prob
    return pmf


@pytest.mark.parametrize("h", [0, 1, 2, 3])
def test_leaf_dp_matches_enumeration(h):
    q = 0.3
    lp = bounds.leaf_pmf_exact(q, h)
    assert np.allclose(lp.pmf, leaf_brute(q, h), atol=1e-14)
    assert np.allclose(np.exp(lp.log_pmf), lp.pmf, atol=1e-14)


def test_leaf_pmf_sums_to_one():
    for h in range(11):
        assert abs(bounds.leaf_pmf_exact(1 / 12, h).pmf.sum() - 1) < 1e-12


def test_leaf_mgf_lambda_zero():
    reports = bounds.leaf_mgf_check(1 / 12, 6, lam=0.0)
    assert reports[0].observed == pytest.approx(0, abs=1e-9) and reports[1].observed == pytest.approx(1)


def test_leaf_tail_fails_for_large_q():
    assert not bounds.leaf_tail_check(0.3, 4).passed


def test_mean_bounds_small():
    p = new_params(2**10, 16, 16, 3, 1)
    leaf, total = bounds.mean_bounds_mc(p, trials=50, seed=1)
    assert leaf.passed and total.passed
    assert leaf.observed <= total.observed


def test_means_shrink_with_c():
    means = [bounds.mean_bounds_mc(quiet_params(2**10, 16, C, 3, 1), trials=60, seed=2)[1].observed
             for C in (8, 32, 256)]
    assert means[0] > means[1] > means[2]


def test_hashed_pd_preconditions():
    with pytest.raises(ValueError):
        bounds.hashed_pd_mean_mc(new_params(256, 8, 16, 3, 2), 6, trials=2)


def test_hashed_pd_small():
    out = bounds.hashed_pd_mean_mc(new_params(2**10, 16, 16, 3, 1), 7, trials=50, seed=3)
    assert out.report.passed and out.discarded == 0
    assert set(out.level_means) == set(range(4, 10))


def test_report_json():
    rep = bounds.leaf_tail_check(1 / 12, 3)
    doc = rep.to_json()
    assert set(doc) >= {"check", "bound", "observed", "stderr", "pass"}
    assert math.isfinite(doc["observed"])


def test_hashed_pd_variance_over_k_bounded():
    ratios = []
    for k in (16, 32, 64):
        out = bounds.hashed_pd_mean_mc(new_params(2**11, k, 16, 3, 1), 8, trials=150, seed=1)
        ratios.append(max(out.report.details["var_over_k"].values()))
    # no growth with k; the constant itself is unspecified, 1 is generous
    assert max(ratios) < 1
    assert max(ratios) / min(ratios) < 3
