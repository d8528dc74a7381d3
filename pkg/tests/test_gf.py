import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from splitpool import field_new, gf_mul, hash_eval, hash_new, verify_rwise
from splitpool.gf import (MODULUS_TABLE, OpCounter, PolyHash, clmul, is_irreducible,
                          poly_mod)
from splitpool.rng import SplitMix64


def schoolbook(a, b, mod):
    """Independent oracle: multiply as coefficient lists, then long division."""
    prod = [0] * (a.bit_length() + b.bit_length() + 1)
    for i in range(a.bit_length()):
        for j in range(b.bit_length()):
            prod[i + j] ^= (a >> i) & (b >> j) & 1
    value = sum(c << i for i, c in enumerate(prod))
    while value.bit_length() >= mod.bit_length():
        value ^= mod << (value.bit_length() - mod.bit_length())
    return value


def test_moduli():
    assert field_new(3).modulus == 0b1011
    assert field_new(8).modulus == 0x11B
    assert field_new(1).modulus == 0b11
    # x^3+x^2+1 is the other irreducible cubic; x^3+x+1 is the smaller one
    assert is_irreducible(0b1011) and is_irreducible(0b1101)
    assert not is_irreducible(0b1111) and not is_irreducible(0b1001)


@pytest.mark.parametrize("m", sorted(MODULUS_TABLE))
def test_table_irreducible(m):
    mod = MODULUS_TABLE[m]
    assert mod.bit_length() - 1 == m
    if m <= 20:
        assert is_irreducible(mod)


def test_field_bounds():
    with pytest.raises(ValueError):
        field_new(0)
    with pytest.raises(ValueError):
        field_new(33)


def test_mul_examples():
    f = field_new(3)
    assert gf_mul(f, 0b010, 0b010) == 0b100
    assert gf_mul(f, 0b100, 0b010) == 0b011
    assert gf_mul(field_new(8), 0x57, 0x83) == 0xC1


@pytest.mark.parametrize("m", [2, 3, 5, 8, 13, 32])
def test_mul_matches_oracle(m):
    f = field_new(m)
    g = SplitMix64(m)
    for _ in range(200):
        a, b = g.bits(m), g.bits(m)
        assert gf_mul(f, a, b) == schoolbook(a, b, f.modulus)
        assert gf_mul(f, a, b) == poly_mod(clmul(a, b), f.modulus)


@pytest.mark.parametrize("m", range(1, 9))
def test_inverses_exhaustive(m):
    f = field_new(m)
    for a in range(1, f.order):
        assert gf_mul(f, a, f.inverse(a)) == 1
        assert gf_mul(f, a, 1) == a


@given(st.integers(1, 16), st.data())
def test_field_axioms(m, data):
    f = field_new(m)
    a, b, c = (data.draw(st.integers(0, f.order - 1)) for _ in range(3))
    assert gf_mul(f, a, b) == gf_mul(f, b, a)
    assert gf_mul(f, gf_mul(f, a, b), c) == gf_mul(f, a, gf_mul(f, b, c))
    assert gf_mul(f, a, b ^ c) == gf_mul(f, a, b) ^ gf_mul(f, a, c)


def test_hash_eval_examples():
    f = field_new(3)
    assert hash_eval(PolyHash(f, (0b001, 0b010), 3), 0b010) == 0b101
    zero = PolyHash(f, (0, 0, 0), 3)
    assert all(hash_eval(zero, x) == 0 for x in range(8))
    const = PolyHash(f, (0b110,), 2)
    assert {hash_eval(const, x) for x in range(8)} == {0b10}
    with pytest.raises(ValueError):
        hash_eval(const, 8)


def test_hash_new():
    f = field_new(8)
    h1 = hash_new(f, 5, 4, SplitMix64(1))
    assert h1 == hash_new(f, 5, 4, SplitMix64(1))
    assert len(h1.coeffs) == 5 and h1.storage_bits == 40
    with pytest.raises(ValueError):
        hash_new(f, 0, 4, SplitMix64(1))
    with pytest.raises(ValueError):
        hash_new(f, 2, 9, SplitMix64(1))


def test_coefficients_uniform():
    f = field_new(8)
    g = SplitMix64(8)
    coeffs = [c for _ in range(2000) for c in hash_new(f, 4, 8, g).coeffs]
    counts = np.bincount(coeffs, minlength=256)
    chi2 = float(((counts - 31.25) ** 2 / 31.25).sum())
    assert 150 < chi2 < 370  # 255 dof


@pytest.mark.parametrize("m,r", [(3, 3), (8, 4), (20, 6), (32, 9)])
def test_eval_many_matches_scalar(m, r):
    f = field_new(m)
    h = hash_new(f, r, max(1, m - 2), SplitMix64(m * r))
    xs = np.array([0, 1, 2, f.order - 1] + list(range(3, 200)), dtype=np.int64) % f.order
    assert [int(v) for v in h.eval_many(xs)] == [hash_eval(h, int(x)) for x in xs]


def test_op_count():
    f = field_new(10)
    h = hash_new(f, 7, 10, SplitMix64(0))
    c = OpCounter()
    for x in range(5):
        hash_eval(h, x, c)
    assert (c.evals, c.mults) == (5, 30)


def test_json_round_trip():
    h = hash_new(field_new(12), 4, 6, SplitMix64(9))
    assert PolyHash.from_json(h.to_json()) == h


def test_rwise_full_width():
    rep = verify_rwise(3, 3, points=(1, 2, 3))
    assert rep.n_polys == 512 and rep.passed
    assert rep.min_count == rep.max_count == 1 and rep.distinct_tuples == 512


def test_rwise_truncated():
    rep = verify_rwise(3, 2, out_bits=1)
    assert rep.n_polys == 64 and rep.passed
    assert rep.min_count == rep.max_count == 16 and rep.distinct_tuples == 4


def test_rwise_single_point():
    rep = verify_rwise(4, 1, points=(9,))
    assert rep.passed and rep.distinct_tuples == 16


def test_rwise_fails_beyond_degree():
    # a degree < 2 polynomial cannot be 3-wise independent: check by hand
    f = field_new(3)
    triples = {tuple(hash_eval(PolyHash(f, c, 3), x) for x in (1, 2, 3))
               for c in itertools.product(range(8), repeat=2)}
    assert len(triples) == 64 < 512


def test_rwise_bad_points():
    with pytest.raises(ValueError):
        verify_rwise(3, 2, points=(1, 1))
    with pytest.raises(ValueError):
        verify_rwise(8, 4)
