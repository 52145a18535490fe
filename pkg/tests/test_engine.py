from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import assume, given, strategies as st

from conftest import boolean_tables, joints, real_tables
from entlab.dist import EntropyParams, Joint, cond_guess_prob_avg, cond_guess_prob_worst
from entlab.distinguisher import Distinguisher, advantage_profile, complement_closure, expect
from entlab.engine import (
    achievable_interval, decomposable_check, evaluate, hill_lp, lower_curve, metric_range,
    metric_witness, modulus_cond, modulus_fit, modulus_witness, penalty_curve, upper_curve,
    waterfill,
)
from entlab.errors import CapOutOfRange, NonBooleanClass
from entlab.lp_oracles import decomposable_value_lp, metric_range_lp, modulus_value_lp

caps = st.sampled_from([F(1), F(1, 2), F(1, 3), F(1, 4), F(3, 8), F(5, 8)])


def gamma_for(j, draw):
    return draw(st.integers(1, j.nx)) * F(1, j.nx)


def test_waterfill_example():
    assert waterfill([1, 0, 0, 1], F(1, 2)) == [F(1, 2), 0, 0, F(1, 2)]
    assert waterfill([1, 0, 0, 1], F(1, 2), descending=False) == [0, F(1, 2), F(1, 2), 0]
    with pytest.raises(CapOutOfRange):
        waterfill([0, 1], F(1, 3))


@given(st.lists(st.integers(0, 4), min_size=4, max_size=4), st.integers(1, 4))
def test_flat_extremes_by_brute_force(vals, size):
    # at cap 1/j the extremes are attained by flat distributions on j points
    iv = achievable_interval(vals, F(1, size))
    means = [F(sum(vals[i] for i in s), size) for s in combinations(range(4), size)]
    assert iv.upper == max(means) and iv.lower == min(means)
    assert upper_curve(vals)(F(1, size)) == iv.upper
    assert lower_curve(vals)(F(1, size)) == iv.lower


@given(st.lists(st.integers(0, 2), min_size=4, max_size=8), st.integers(0, 2), st.randoms())
def test_top_set_value_ignores_tie_order(vals, k, rnd):
    # uniform over a top-2^k set: which tied points get chosen cannot change E D
    assume(1 << k <= len(vals))
    cap = F(1, 1 << k)
    perm = list(range(len(vals)))
    rnd.shuffle(perm)
    shuffled = [vals[i] for i in perm]
    base = sum(v * p for v, p in zip(vals, waterfill(vals, cap)))
    assert sum(v * p for v, p in zip(shuffled, waterfill(shuffled, cap))) == base


@given(st.lists(st.integers(0, 4), min_size=4, max_size=4), caps)
def test_curves_match_waterfill_between_breakpoints(vals, cap):
    iv = achievable_interval(vals, cap)
    assert upper_curve(vals)(cap) == iv.upper
    assert lower_curve(vals)(cap) == iv.lower
    assert upper_curve(vals).is_concave() and lower_curve(vals).is_convex()


@given(st.lists(st.integers(0, 4), min_size=4, max_size=4), caps, st.integers(0, 4))
def test_penalty_curve(vals, cap, t):
    target = F(t, 4)
    assert penalty_curve(vals, target)(cap) == achievable_interval(vals, cap).distance(target)


def test_opposite_signs_separate_metric_from_modulus(diagonal_joint):
    cls = [Distinguisher.from_flat(1, 1, [0, 0, 1, 1], "boolean")]  # D = x0
    p = EntropyParams(F(1, 2), F(0))
    assert evaluate("metric-avg", diagonal_joint, cls, p).holds
    v = modulus_cond(diagonal_joint, cls, p)
    assert not v.holds and v.value == F(1, 2)


def test_modulus_needs_boolean_class(diagonal_joint):
    d = Distinguisher.from_flat(1, 1, [0, F(1, 2), 1, 1])
    with pytest.raises(NonBooleanClass):
        modulus_cond(diagonal_joint, [d], EntropyParams(F(1, 2)))


def test_min_entropy_uniform():
    j = Joint.from_table([[F(1, 4)]] * 4)
    assert evaluate("min", j, [], EntropyParams.from_k(2)).holds
    assert not evaluate("min", j, [], EntropyParams.from_k(3)).holds


# greedy allocators against the exact LP


@given(st.data())
def test_metric_range_matches_lp(data):
    j = data.draw(joints(max_n=2, max_m=2))
    d = data.draw(real_tables(j.n, j.m, count=1))[0]
    g = gamma_for(j, data.draw)
    for variant in ("avg", "worst"):
        r = metric_range(d, j, g, variant)
        assert (r.lower, r.upper) == metric_range_lp(d, j, g, variant)


@given(st.data())
def test_modulus_matches_lp(data):
    j = data.draw(joints(max_n=2, max_m=2))
    d = data.draw(boolean_tables(j.n, j.m, count=1))[0]
    g = gamma_for(j, data.draw)
    for variant in ("avg", "worst"):
        assert modulus_fit(d, j, g, variant).value == modulus_value_lp(d, j, g, variant)


@given(st.data())
def test_decomposable_matches_lp(data):
    j = data.draw(joints(max_n=2, max_m=2))
    cls = data.draw(boolean_tables(j.n, j.m))
    g = gamma_for(j, data.draw)
    assert decomposable_check(j, cls, EntropyParams(g)).value == decomposable_value_lp(j, cls, g)


# witnesses


@given(st.data())
def test_metric_witness_is_feasible(data):
    j = data.draw(joints(max_n=2, max_m=2))
    d = data.draw(real_tables(j.n, j.m, count=1))[0]
    g = gamma_for(j, data.draw)
    r = metric_range(d, j, g)
    y = metric_witness(d, j, r)
    assert cond_guess_prob_avg(y) <= g
    assert abs(expect(d, y) - expect(d, j)) == r.distance
    assert y.z_marginal() == j.z_marginal()


@given(st.data())
def test_modulus_witness_is_feasible(data):
    j = data.draw(joints(max_n=2, max_m=2))
    d = data.draw(boolean_tables(j.n, j.m, count=1))[0]
    g = gamma_for(j, data.draw)
    for variant in ("avg", "worst"):
        fit = modulus_fit(d, j, g, variant)
        y = modulus_witness(d, j, fit)
        if variant == "avg":
            assert cond_guess_prob_avg(y) <= g
        else:
            assert cond_guess_prob_worst(y) <= g
        assert advantage_profile(d, j, y).modulus == fit.value


@given(st.data())
def test_decomposable_budget_is_spent_exactly(data):
    j = data.draw(joints(max_n=2, max_m=2))
    cls = data.draw(boolean_tables(j.n, j.m))
    g = gamma_for(j, data.draw)
    a = decomposable_check(j, cls, EntropyParams(g)).witness
    assert a.spent(j.z_marginal()) == g
    assert all(c is None or F(1, j.nx) <= c <= 1 for c in a.caps)


# implications between notions at identical parameters


@given(st.data())
def test_notion_implications(data):
    j = data.draw(joints(max_n=2, max_m=2))
    cls = data.draw(boolean_tables(j.n, j.m))
    g = gamma_for(j, data.draw)
    eps = F(data.draw(st.integers(0, 8)), 16)
    p = EntropyParams(g, eps)
    held = {n: evaluate(n, j, cls, p).holds
            for n in ("metric-avg", "modulus-avg", "modulus-worst", "hill-avg", "decomposable",
                      "metric-worst")}
    if held["hill-avg"]:
        assert held["metric-avg"]
    if held["modulus-avg"]:
        assert held["metric-avg"]
    if held["modulus-worst"]:
        assert held["modulus-avg"] and held["metric-worst"]
    if held["decomposable"]:
        assert held["modulus-avg"]
    if held["metric-worst"]:
        assert held["metric-avg"]


@given(st.data())
def test_entropy_of_x_itself(data):
    # when X already meets the cap every notion holds with eps = 0
    j = data.draw(joints(max_n=2, max_m=2))
    cls = data.draw(boolean_tables(j.n, j.m))
    p = EntropyParams(cond_guess_prob_avg(j))
    for n in ("metric-avg", "modulus-avg", "hill-avg", "decomposable"):
        assert evaluate(n, j, cls, p).holds


@given(st.data())
def test_monotone_in_gamma(data):
    j = data.draw(joints(max_n=2, max_m=1))
    cls = data.draw(boolean_tables(j.n, j.m))
    vals = [modulus_cond(j, cls, EntropyParams(F(i, j.nx))).value for i in range(1, j.nx + 1)]
    assert vals == sorted(vals, reverse=True)


@given(st.data())
def test_hill_value_is_game_value(data):
    j = data.draw(joints(max_n=2, max_m=1))
    cls = complement_closure(data.draw(boolean_tables(j.n, j.m)))
    g = gamma_for(j, data.draw)
    t, y = hill_lp(j, cls, g)
    assert cond_guess_prob_avg(y) <= g
    assert max(abs(expect(d, j) - expect(d, y)) for d in cls) == t
    assert t >= max(metric_range(d, j, g).distance for d in cls)
