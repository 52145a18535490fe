import math
import random
from fractions import Fraction as F

import pytest

from entlab.boost import BoostConfig, metric_to_hill_boost, rounds_bound
from entlab.dist import EntropyParams, cond_guess_prob_avg
from entlab.distinguisher import Distinguisher, complement_closure, expect
from entlab.engine import hill_lp
from entlab.errors import NonClosedClass
from entlab.generate import concentrated_instance, random_class, random_joint


def test_rounds_bound():
    assert rounds_bound(16, F(1, 4)) == math.ceil(16 * math.log(16) * 16)
    assert rounds_bound(64, F(1, 8), 1.0) == math.ceil(math.log(64) * 64)


def test_needs_closed_class(diagonal_joint):
    d = Distinguisher.from_flat(1, 1, [0, 0, 1, 1], "boolean")
    with pytest.raises(NonClosedClass):
        metric_to_hill_boost(diagonal_joint, [d], EntropyParams(F(1, 2)), F(1, 8))


@pytest.mark.parametrize("seed", range(4))
def test_witness_when_game_value_is_small(seed):
    rng = random.Random(seed)
    j = random_joint(rng, 2, 1)
    cls = random_class(rng, 2, 1, 4, closed=True)
    value, _ = hill_lp(j, cls, F(1, 2))
    res = metric_to_hill_boost(j, cls, EntropyParams(F(1, 2), value), F(1, 8))
    assert res.outcome == "witness"
    assert cond_guess_prob_avg(res.witness) <= F(1, 2)
    assert max(abs(expect(d, j) - expect(d, res.witness)) for d in cls) <= value


@pytest.mark.parametrize("seed", range(4))
def test_combo_when_game_value_is_large(seed):
    rng = random.Random(seed)
    j, d = concentrated_instance(rng, 3, 1, flip_some=False)
    cls = complement_closure([d] + random_class(rng, 3, 1, 3))
    delta = F(1, 8)
    value, _ = hill_lp(j, cls, F(1, 8))
    eps = value - 3 * delta / 2
    assert eps > 0
    res = metric_to_hill_boost(j, cls, EntropyParams(F(1, 8), eps), delta)
    assert res.outcome == "combo"
    assert res.combo_advantage >= eps
    assert res.length <= rounds_bound(j.nx * j.nz, delta)
    assert sum(res.weights) == 1


def test_no_combination_beats_the_game_value():
    rng = random.Random(11)
    j, d = concentrated_instance(rng, 2, 1, flip_some=False)
    cls = complement_closure([d])
    res = metric_to_hill_boost(j, cls, EntropyParams(F(1, 4), F(1)), F(1, 4),
                               BoostConfig(C=4.0), force_mw=True)
    assert res.outcome == "witness"
    assert res.combo_advantage <= res.game_value
