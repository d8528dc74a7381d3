import itertools

import pytest

from splitpool import TreeNode, ancestor_node, group_of, new_params, num_tests
from splitpool.params import next_power_of_two

from conftest import quiet_params


def test_rounds_to_powers_of_two():
    p = new_params(1000, 10, 16, 3, 1, seed=7)
    assert (p.n, p.k) == (1024, 16)
    assert (p.requested_n, p.requested_k) == (1000, 10)


def test_k_half_n_boundary():
    p = new_params(16, 8)
    assert p.k == 8 and p.ell_min == 3 and p.ell_max == 4


def test_k_clamped():
    assert new_params(16, 12).k == 8


@pytest.mark.parametrize("kwargs", [
    dict(n=16, k=3, C=12), dict(n=1, k=1), dict(n=16, k=0),
    dict(n=16, k=2, C=2), dict(n=16, k=2, Cprime=0), dict(n=16, k=2, Ctil=0),
])
def test_validation(kwargs):
    with pytest.raises(ValueError):
        new_params(**kwargs)


def test_small_c_warns():
    with pytest.warns(UserWarning):
        new_params(16, 2, C=8)


@pytest.mark.parametrize("n,k,C,Cp,expected", [
    (1024, 16, 16, 3, 1920),
    (16, 2, 16, 3, 108),
    (4, 2, 4, 1, 12),
])
def test_num_tests_examples(n, k, C, Cp, expected):
    p = quiet_params(n, k, C, Cp, 1)
    assert num_tests(p) == expected == p.t


def test_num_tests_with_repetitions():
    p = new_params(1024, 16, 16, 3, 2)
    assert p.t == 2 * 1536 + 384


def test_layout_covers_all_tests():
    p = new_params(256, 8, 16, 2, 3)
    segs = p.layout.segments()
    pos = 0
    for s in segs:
        assert s["offset"] == pos
        pos += s["length"]
    assert pos == p.t
    with pytest.raises(IndexError):
        p.layout.level_offset(p.ell_max, 0)
    with pytest.raises(IndexError):
        p.layout.final_offset(p.final_sequences)


def test_group_examples():
    p = new_params(16, 2)
    assert group_of(TreeNode(4, 5), p) == range(5, 6)
    assert group_of(TreeNode(2, 3), p) == range(12, 16)
    assert group_of(TreeNode(0, 0), p) == range(0, 16)
    assert ancestor_node(13, 2, new_params(16, 4)) == TreeNode(2, 3)
    with pytest.raises(ValueError):
        ancestor_node(13, 0, p)
    with pytest.raises(ValueError):
        group_of(TreeNode(2, 4), p)


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 64])
def test_tree_round_trip(n):
    p = new_params(n, 1)
    for level in range(0, p.log_n + 1):
        groups = [group_of(TreeNode(level, j), p) for j in range(1 << level)]
        assert [i for g in groups for i in g] == list(range(n))
        for j, g in enumerate(groups):
            node = TreeNode(level, j)
            if level < p.log_n:
                a, b = node.children()
                assert list(group_of(a, p)) + list(group_of(b, p)) == list(g)
                assert a.parent() == node == b.parent()
    for i, level in itertools.product(range(n), range(p.ell_min, p.ell_max + 1)):
        assert i in group_of(ancestor_node(i, level, p), p)
    assert ancestor_node(n - 1, p.log_n, p) == TreeNode(p.log_n, n - 1)


def test_next_power_of_two():
    assert [next_power_of_two(x) for x in (0, 1, 2, 3, 5, 8, 9)] == [1, 1, 2, 4, 8, 8, 16]
