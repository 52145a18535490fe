from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import joints
from entlab.dist import (
    Dist, EntropyParams, Joint, avg_to_worst_split, bits, cond_guess_prob_avg,
    cond_guess_prob_worst, condition, frac, guess_prob, it_chain_rule_check,
    statistical_distance,
)
from entlab.errors import DomainError, InvalidDistribution, ZeroMassCondition


def test_uniform_and_point():
    assert guess_prob(Dist.uniform(3)) == F(1, 8)
    assert guess_prob(Dist.point(2, 1)) == 1
    assert Dist.point(2, 1).support() == [1]


def test_rejects_bad_mass():
    with pytest.raises(InvalidDistribution):
        Dist.from_probs([F(1, 2), F(1, 4)])
    with pytest.raises(DomainError):
        Dist.from_probs([F(1, 3)] * 3)
    with pytest.raises(InvalidDistribution):
        Dist.from_probs([F(3, 2), F(-1, 2)])


def test_zero_column_needs_flag():
    table = [[F(1, 2), 0], [F(1, 2), 0]]
    with pytest.raises(InvalidDistribution):
        Joint.from_table(table)
    j = Joint.from_table(table, degenerate=True)
    with pytest.raises(ZeroMassCondition):
        condition(j, 1)
    assert cond_guess_prob_worst(j) == F(1, 2)


def test_frac_is_exact():
    assert frac("3/8") == F(3, 8)
    assert frac(0.1) == F(0.1)  # binary expansion, not 1/10
    assert frac(True) == 1
    with pytest.raises(TypeError):
        frac([1])


def test_params_from_k():
    p = EntropyParams.from_k(3, "1/16")
    assert p.gamma == F(1, 8) and p.epsilon == F(1, 16)
    assert p.display_k == 3.0
    with pytest.raises(ValueError):
        EntropyParams(F(0))
    with pytest.raises(ValueError):
        EntropyParams(F(1, 2), F(2))


def test_bits():
    assert bits(F(1, 4)) == 2.0
    assert bits(0) == float("inf")


def test_diagonal_guessing(diagonal_joint):
    # X is determined by Z
    assert cond_guess_prob_avg(diagonal_joint) == 1
    assert cond_guess_prob_worst(diagonal_joint) == 1
    assert guess_prob(diagonal_joint.x_marginal()) == F(1, 2)


def test_split_packing():
    table = [[F(1, 8)] * 4 for _ in range(2)]
    j = Joint.from_table(table, z_split=(1, 1))
    assert j.pair(1, 0) == 1 and j.pair(0, 1) == 2
    assert j.split(3) == (1, 1)
    assert j.marginal_z1().nz == 2


def test_statistical_distance():
    assert statistical_distance(Dist.point(1, 0), Dist.point(1, 1)) == 1
    assert statistical_distance(Dist.uniform(1), Dist.point(1, 0)) == F(1, 2)


@given(joints())
def test_avg_between_marginal_and_worst(j):
    avg = cond_guess_prob_avg(j)
    assert guess_prob(j.x_marginal()) <= avg <= cond_guess_prob_worst(j)


@given(joints(split=True))
def test_chain_rule_holds(j):
    assert it_chain_rule_check(j).holds


@given(joints(), st.sampled_from([F(1), F(1, 2), F(1, 4), F(1, 8)]))
def test_markov_split_mass(j, delta):
    s = avg_to_worst_split(j, delta)
    assert s.good_mass >= 1 - delta
    zm = j.z_marginal()
    for z in s.good_z:
        assert guess_prob(condition(j, z)) <= s.gamma
    assert s.good_mass == sum(zm[z] for z in s.good_z)


@given(joints())
def test_conditionals_rebuild_joint(j):
    conds = [condition(j, z) for z in range(j.nz)]
    assert Joint.from_conditionals(j.z_marginal(), conds) == j
