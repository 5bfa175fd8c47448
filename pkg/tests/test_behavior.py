import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gmecert import behavior as bh
from gmecert.behavior import Behavior, BehaviorError, SignalingError


def brute_correlator(p, x, y, z):
    total = 0.0
    for a, b, c in itertools.product((0, 1), repeat=3):
        total += (-1) ** (a + b + c) * p.prob(a, b, c, x, y, z)
    return total


def random_local(rng):
    # convex mixture of deterministic boxes
    strategies = list(itertools.product((0, 1), repeat=2))
    w = rng.dirichlet(np.ones(6))
    total = np.zeros((2,) * 6)
    for wi in w:
        fa, fb, fc = (strategies[i] for i in rng.integers(0, 4, 3))
        total += wi * bh.deterministic(fa, fb, fc).p
    return Behavior(total)


def test_index_order_is_xyz_then_abc():
    p = bh.deterministic((0, 1), (1, 1), (0, 0))
    assert p.prob(1, 1, 0, 1, 0, 1) == 1.0
    assert p.flat[int("101110", 2)] == 1.0


def test_rejects_bad_tables():
    with pytest.raises(BehaviorError):
        Behavior(np.full((2,) * 6, 0.2))
    bad = np.full((2,) * 6, 1 / 8)
    bad[0, 0, 0, 0, 0, 0] = -0.1
    bad[0, 0, 0, 0, 0, 1] += 0.1
    with pytest.raises(BehaviorError):
        Behavior(bad)


def test_behavior_is_immutable():
    p = bh.white_noise()
    with pytest.raises(ValueError):
        p.p[0, 0, 0, 0, 0, 0] = 1


def test_json_round_trip():
    p = bh.deterministic((0, 1), (1, 0), (1, 1))
    back = Behavior.from_json(json.dumps(p.to_json()))
    assert np.array_equal(back.p, p.p)


@pytest.mark.parametrize("payload", [
    {"inputs": 3, "outputs": 2, "parties": 3, "p": [1 / 64] * 64},
    {"inputs": 2, "outputs": 2, "parties": 3, "p": [1 / 63] * 63},
    {"inputs": 2, "outputs": 2, "parties": 3, "p": ["x"] * 64},
    [],
])
def test_from_json_schema_errors(payload):
    with pytest.raises(BehaviorError):
        Behavior.from_json(payload)


def test_correlators_match_brute_force():
    rng = np.random.default_rng(3)
    p = random_local(rng)
    e = bh.correlators(p)
    for x, y, z in itertools.product((0, 1), repeat=3):
        assert abs(e[x, y, z] - brute_correlator(p, x, y, z)) < 1e-14
        assert abs(bh.correlator(p, x, y, z) - e[x, y, z]) < 1e-14


def test_signaling_detected():
    # Alice's output copies Bob's input
    p = Behavior.from_function(lambda a, b, c, x, y, z: 0.25 * (a == y))
    ok, dev = bh.is_no_signaling(p)
    assert not ok and dev == pytest.approx(0.5)
    with pytest.raises(SignalingError) as info:
        bh.single_marginal_expectation(p, "A", 0)
    assert info.value.deviation == pytest.approx(0.5)


def test_white_noise_marginals():
    p = bh.white_noise()
    assert bh.is_no_signaling(p)[0]
    for k in range(3):
        assert bh.is_marginal_maximally_mixed(p, k)
    assert np.allclose(bh.correlators(p), 0)


def test_deterministic_marginals():
    p = bh.deterministic((0, 1), (1, 1), (0, 0))
    assert bh.single_marginal_expectation(p, "A", 0) == 1
    assert bh.single_marginal_expectation(p, "A", 1) == -1
    assert bh.single_marginal_expectation(p, "B", 0) == -1
    assert bh.pair_marginal(p, "AC").correlator(1, 0) == -1


def test_marginal_profile_json():
    prof = bh.marginal_profile(bh.white_noise())
    js = prof.to_json()
    assert set(js["single"]) == {"A", "B", "C"}
    assert set(js["pair"]) == {"AB", "AC", "BC"}


def test_csv_rows_follow_flat_order():
    p = bh.deterministic((0, 1), (1, 0), (1, 1))
    rows = p.to_csv_rows()
    assert rows[0] == ("x", "y", "z", "a", "b", "c", "p")
    assert [float(r[-1]) for r in rows[1:]] == list(p.flat)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_local_mixtures_are_no_signaling(seed):
    p = random_local(np.random.default_rng(seed))
    assert bh.signaling_deviation(p) < 1e-12
    assert abs(p.flat.sum() - 8) < 1e-12


def test_product_with_pair_places_parties():
    pair = bh.BipartiteBehavior.from_function(lambda a, b, x, y: float(a == x and b == 1 - y))
    single = np.array([[1.0, 0.0], [1.0, 0.0]])
    p = bh.product_with_pair(single, pair, "B|AC")
    # B always outputs 0, A copies x, C outputs 1 - z
    for x, y, z in itertools.product((0, 1), repeat=3):
        assert p.prob(x, 0, 1 - z, x, y, z) == 1.0
