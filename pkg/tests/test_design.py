import json

import numpy as np
import pytest

from splitpool import build_explicit_assignment, new_params, rng
from splitpool.design import ExplicitAssignment

from conftest import quiet_params


def oracle_slots(seed, level, rep, count, block):
    g = rng.SplitMix64(rng.derive_key(seed, rng.LEVEL, level, rep))
    return [g.next_u64() % block for _ in range(count)]


def test_matches_sequential_oracle():
    p = new_params(64, 4, 16, 2, 2, seed=99)
    a = build_explicit_assignment(p)
    for level in range(p.ell_min, p.ell_max):
        for rep in range(p.Ctil):
            got = a.level_slots(level, rep, np.arange(1 << level))
            assert list(got) == oracle_slots(99, level, rep, 1 << level, p.block_size)
    for s in range(p.final_sequences):
        g = rng.SplitMix64(rng.derive_key(99, rng.FINAL, s))
        assert list(a.final_slots(s, np.arange(64))) == [g.next_u64() % 8 for _ in range(64)]


def test_deterministic():
    p = new_params(1024, 16, seed=5)
    assert build_explicit_assignment(p) == build_explicit_assignment(p)
    assert build_explicit_assignment(p) != build_explicit_assignment(p.with_seed(6))


def test_minimal_level_structure():
    p = quiet_params(4, 2, 4, 1, 1)
    a = build_explicit_assignment(p)
    assert list(a.level_slots_table) == [(1, 0)]
    assert a.final_table.shape == (1, 4)


def test_slots_uniform():
    p = new_params(2**16, 16, seed=3)
    a = build_explicit_assignment(p)
    bins = p.block_size
    slots = a.level_slots(15, 0, np.arange(1 << 15))
    counts = np.bincount(slots, minlength=bins)
    expected = (1 << 15) / bins
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    # 255 dof: mean 255, sd about 22.6; 5 sd either way
    assert 142 < chi2 < 368
    assert slots.max() < bins and slots.min() >= 0


def test_json_round_trip():
    p = new_params(128, 8, 16, 2, 2, seed=1)
    a = build_explicit_assignment(p)
    doc = json.loads(json.dumps(a.to_json()))
    assert doc["t"] == p.t and doc["variant"] == "explicit"
    assert ExplicitAssignment.from_json(doc) == a


def test_golden_dump(small_params):
    import hashlib
    doc = json.dumps(build_explicit_assignment(small_params).to_json(), sort_keys=True)
    assert hashlib.sha256(doc.encode()).hexdigest()[:16] == "0c29e6138a6f2cba"


def test_from_json_rejects_off_grid():
    doc = build_explicit_assignment(new_params(16, 2)).to_json()
    doc["params"]["n"] = 15
    with pytest.raises(ValueError):
        ExplicitAssignment.from_json(doc)
