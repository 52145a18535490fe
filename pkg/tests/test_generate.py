from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from entlab.engine import modulus_fit
from entlab.errors import BudgetExceeded
from entlab.generate import (
    InstanceSpec, concentrated_instance, concentrated_real, generate_instance, instance_rng,
    random_injective, random_joint,
)
from entlab import circuit as circ


def test_same_seed_same_scenario():
    a = generate_instance(InstanceSpec(), seed=3, index=2)
    b = generate_instance(InstanceSpec(), seed=3, index=2)
    assert a.to_json() == b.to_json()
    assert a.to_json() != generate_instance(InstanceSpec(), seed=4, index=2).to_json()


def test_default_shape():
    sc = generate_instance()
    assert (sc.n, sc.m) == (2, 2) and len(sc.cls) == 4


def test_streams_independent_of_order():
    first = instance_rng("X", 1, 5).random()
    instance_rng("X", 1, 4).random()
    assert instance_rng("X", 1, 5).random() == first


@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 10 ** 6))
def test_generated_mass_is_exact(n, m, seed):
    j = random_joint(instance_rng("t", seed), n, m)
    assert sum(sum(r) for r in j.probs) == 1
    assert all(p > 0 for p in j.z_marginal())
    assert all(p.denominator <= 1024 for row in j.probs for p in row)


def test_split_and_enumerated_class():
    sc = generate_instance(InstanceSpec(n=1, m=2, m1=1, m2=1, class_kind="enumerate",
                                        complement_closed=True))
    assert sc.joint.z_split == (1, 1)
    assert len(sc.cls) >= 2


def test_spec_guards():
    with pytest.raises(ValueError):
        InstanceSpec(m=2, m1=1, m2=0)
    with pytest.raises(BudgetExceeded):
        InstanceSpec(n=6, m=4)


@given(st.integers(0, 10 ** 6))
def test_concentrated_instances_violate(seed):
    j, d = concentrated_instance(instance_rng("c", seed), 3, 1, flip_some=False)
    # X puts 7/8 on at most two points, so a cap of 1/8 leaves a gap
    assert modulus_fit(d, j, F(1, 8), "worst").value > 0


def test_concentrated_real_is_real():
    j, d = concentrated_real(instance_rng("r", 0), 2, 1)
    assert d.kind == "real"


def test_random_injective():
    f = random_injective(instance_rng("f", 0))
    outs = {tuple(circ.evaluate(c, u, 0) for c in f) for u in range(4)}
    assert len(outs) == 4
