import random
from fractions import Fraction as F
from itertools import product
from math import comb

import pytest
from hypothesis import given, strategies as st

from conftest import boolean_tables, joints
from entlab import circuit as circ
from entlab import reductions as red
from entlab.dist import Dist, EntropyParams, Joint, cond_guess_prob_avg
from entlab.distinguisher import Distinguisher, expect
from entlab.engine import metric_range, modulus_cond, modulus_fit
from entlab.errors import HypothesisNotViolated, InfeasibleWitness, PreconditionFailed
from entlab.generate import concentrated_instance, concentrated_real, random_dist, random_joint

seeds = st.integers(0, 2 ** 32)


def violating(seed, n=2, m=1, gamma=F(1, 4)):
    rng = random.Random(seed)
    for _ in range(200):
        j, d = concentrated_instance(rng, n, m)
        value = modulus_fit(d, j, gamma, "worst").value
        if value > 0:
            return j, d, value
    pytest.skip("no violating draw")


# counting helpers


def test_sampler_ell_examples():
    assert red.sampler_ell(1) == 63
    assert red.sampler_ell(F(1, 2)) == 255


def test_chernoff_ell():
    assert red.chernoff_ell(4, F(1, 2), F(1, 4)) == 129
    assert red.chernoff_ell(8, F(1, 16), F(1, 512)) == 73729
    # non-dyadic delta2 goes through the high-precision log
    assert red.chernoff_ell(1, 1, F(1, 3)) == 7  # 4 log2(3) = 6.34


def test_chernoff_check():
    art = red.chernoff_check(2, F(1, 2), F(1, 4))
    assert art.ok and art.certificate["ell"] == 129


def test_min_copies():
    assert red.min_copies(F(1, 4)) == 7
    assert F(5, 4) ** 6 < 4 <= F(5, 4) ** 7  # 1.25^6 is about 3.81


def test_majority_repeats():
    assert red.majority_repeats(F(3, 4), F(1, 4)) == 1
    r = red.majority_repeats(F(3, 4), F(1, 100))
    fail = sum(comb(r, i) * F(3, 4) ** i * F(1, 4) ** (r - i) for i in range((r - 1) // 2 + 1))
    assert fail <= F(1, 100)
    with pytest.raises(ValueError):
        red.majority_repeats(F(1, 2), F(1, 4))


@given(st.integers(1, 40), st.data())
def test_binom_cdf_exact(ell, data):
    M = data.draw(st.sampled_from([2, 4, 8, 16]))
    c = data.draw(st.integers(0, M))
    k = data.draw(st.integers(-1, ell))
    want = sum((comb(ell, i) * F(c, M) ** i * (1 - F(c, M)) ** (ell - i)
                for i in range(max(k, -1) + 1)), F(0))
    got = red.binom_cdf(ell, c, M, k)
    assert F(int(got.numerator), int(got.denominator)) == want


def test_binom_cdf_against_scipy():
    binom = pytest.importorskip("scipy.stats").binom
    for ell, c, M, k in [(129, 3, 64, 5), (500, 10, 256, 30), (1000, 1, 2, 480)]:
        assert abs(float(red.binom_cdf(ell, c, M, k)) - binom.cdf(k, ell, c / M)) < 1e-12


# leakage


def test_leakage_fails_for_real_valued_tests():
    d = Distinguisher.from_flat(2, 0, [1, F(1, 2), F(1, 2), 0])
    # Z reveals which of the two points X sits on
    j = Joint.from_table([[F(1, 2), 0], [0, 0], [0, 0], [0, F(1, 2)]])
    with pytest.raises(InfeasibleWitness):
        red.leakage_witness(d, j, Dist.uniform(2), F(1, 4))


@given(st.data())
def test_leakage_boolean(data):
    j = data.draw(joints(max_n=3, max_m=2))
    d = data.draw(boolean_tables(j.n, 0, count=1))[0]
    y = random_dist(random.Random(data.draw(seeds)), j.n, 6)
    art = red.leakage_witness(d, j, y)
    assert art.ok
    # each piece misses its column by at most eps / P(z), so the aggregate is at most eps
    zm = j.z_marginal()
    agg = sum(zm[z] * g for z, g in art.certificate["gaps"].items())
    assert agg <= art.certificate["eps"] * j.nz


# chain rule and avg-to-worst


@given(st.data())
def test_chain_rule_witness(data):
    j3 = data.draw(joints(max_n=2, max_m=1, split=True))
    cls = data.draw(boolean_tables(j3.n, j3.m))
    j1 = j3.marginal_z1()
    gamma = F(data.draw(st.integers(1, j3.nx)), j3.nx)
    eps = max(modulus_fit(red._slice_z2(d, j3, z2), j1, gamma).value
              for d in cls for z2 in range(1 << j3.z_split[1]))
    for art in red.modulus_chain_rule(j3, cls, EntropyParams(gamma, eps)):
        assert art.ok, art.failed_checks()


def test_chain_rule_precondition():
    # X is the point 0 and D recognizes it: no Y with cap 1/4 comes close
    j3 = Joint.from_table([[F(1, 2), F(1, 2)], [0, 0], [0, 0], [0, 0]], z_split=(0, 1))
    d = Distinguisher.from_flat(2, 1, [1, 1, 0, 0, 0, 0, 0, 0], "boolean")
    with pytest.raises(PreconditionFailed):
        red.modulus_chain_rule(j3, [d], EntropyParams(F(1, 4), 0))


@given(st.data())
def test_avg_to_worst(data):
    j = data.draw(joints(max_n=2, max_m=2))
    cls = data.draw(boolean_tables(j.n, j.m))
    gamma = F(data.draw(st.integers(1, j.nx)), j.nx)
    eps = modulus_cond(j, cls, EntropyParams(gamma)).value
    delta = data.draw(st.sampled_from([F(1, 2), F(1, 4), F(1, 8)]))
    assert red.avg_to_worst_modulus(j, cls, EntropyParams(gamma, eps), delta).ok


# core lemma and truncation


@given(seeds)
def test_core_lemma(seed):
    j, d, value = violating(seed)
    art = red.core_lemma_event(d, j, F(1, 4), value)
    assert art.ok, art.failed_checks()
    assert art.certificate["p_star"] == max(art.certificate["p_D"], art.certificate["p_Dc"])


def test_core_lemma_needs_a_violation(diagonal_joint):
    d = Distinguisher.from_flat(1, 1, [0, 0, 1, 1], "boolean")
    with pytest.raises(HypothesisNotViolated):
        red.core_lemma_event(d, diagonal_joint, F(1), F(1, 2))


def test_core_lemma_scenario_values():
    from entlab.scenario import load_scenario
    sc = load_scenario("scenarios/concentrated.json")
    art = red.core_lemma_event(sc.cls[0], sc.joint, sc.params.gamma,
                               modulus_fit(sc.cls[0], sc.joint, sc.params.gamma, "worst").value)
    assert art.certificate["p_star"] == F(35, 64)


@given(seeds, st.integers(0, 2))
def test_heavy_truncation(seed, t):
    j, d, value = violating(seed, n=2, m=2)
    art = red.metric_from_modulus(d, j, F(1, 4), t)
    assert art.ok
    assert art.certificate["kept"] == 1 << (2 - t)


def test_truncation_keeps_everything_at_t0():
    d = Distinguisher.from_flat(1, 1, [0, 1, 1, 0], "boolean")
    assert red.heavy_truncation(d, [F(1), F(0)], 0).values == d.values


# sampler


def brute_acceptance(col, probs, ell):
    """P[v > max of ell draws] by enumerating all draw tuples."""
    out = []
    for v in col:
        total = F(0)
        for draws in product(range(len(probs)), repeat=ell):
            if all(v > col[y] for y in draws):
                p = F(1)
                for y in draws:
                    p *= probs[y]
                total += p
        out.append(total)
    return out


@given(st.data())
def test_sampler_acceptance_by_enumeration(data):
    j = data.draw(joints(max_n=2, max_m=1))
    vals = [F(data.draw(st.integers(0, 3)), 3) for _ in range(j.nx * j.nz)]
    d = Distinguisher.from_flat(j.n, j.m, vals)
    sampler = red.Sampler.from_joint(data.draw(joints(max_n=j.n, max_m=j.m)
                                               .filter(lambda y: (y.n, y.m) == (j.n, j.m))))
    ell = data.draw(st.integers(1, 3))
    acc = red.sampler_acceptance(d, sampler, ell)
    for z in range(j.nz):
        want = brute_acceptance(d.column(z), sampler.conditionals[z].probs, ell)
        assert [acc[x][z] for x in range(j.nx)] == want


def test_sampler_ties_reject():
    j = Joint.from_table([[F(1, 4)] * 2] * 2)
    d = Distinguisher.constant(1, 1, F(1, 2))
    art = red.sampler_distinguisher(d, red.Sampler.uniform(1, 1), 1, j)
    assert art.certificate["y_accept"] == 0 and art.certificate["x_accept"] == 0


@pytest.mark.parametrize("seed", range(3))
def test_sampler_gap(seed):
    rng = random.Random(seed)
    gamma = F(1, 4)
    for _ in range(200):
        j, d = concentrated_instance(rng, 12, 1, F(15, 16))
        value = modulus_fit(d, j, gamma, "worst").value
        if value and red.sampler_ell(value) <= 512:
            break
    core = red.core_lemma_event(d, j, gamma, value)
    art = red.sampler_distinguisher(core.distinguisher, red.Sampler.uniform(12, 1), value, j,
                                    gamma=gamma)
    assert art.ok, art.failed_checks()


def test_sampler_monte_carlo_agrees():
    rng = random.Random(5)
    j, d = concentrated_instance(rng, 3, 1, F(7, 8))
    sampler = red.Sampler.uniform(3, 1)
    acc = red.sampler_acceptance(d, sampler, 3)
    x_side = sum(j.probs[x][z] * acc[x][z] for x in range(j.nx) for z in range(j.nz))
    mc = red.sampler_monte_carlo(d, sampler, j, 3, 20000, seed=1)
    sd = (float(x_side) * (1 - float(x_side)) / 20000) ** 0.5
    assert abs(mc["x_rate"] - float(x_side)) <= 4 * sd + 1e-12


# approximate counting


@pytest.mark.parametrize("seed", range(4))
def test_count_oracle_mode(seed):
    rng = random.Random(seed)
    j, d = concentrated_instance(rng, 4, 1, F(15, 16), set_sizes=(1,), flip_some=False)
    art = red.approx_count_distinguisher(d, j, F(1, 8), F(1, 2), "exact-oracle", copies=6)
    assert art.certificate["copies"] == 6 and not art.certificate["copies_cover_gamma"]
    assert art.ok, art.failed_checks()


def test_count_chernoff_mode():
    rng = random.Random(3)
    j, d = concentrated_instance(rng, 4, 1, F(15, 16), set_sizes=(1,), flip_some=False)
    art = red.approx_count_distinguisher(d, j, F(1, 8), F(1, 2), "chernoff-sampling")
    assert art.ok, art.failed_checks()
    assert art.certificate["ell"] == art.certificate["ell_chernoff"]


# real to boolean


@given(seeds)
def test_real_to_boolean(seed):
    rng = random.Random(seed)
    j, d = concentrated_real(rng, 2, 1)
    gamma = F(1, 4)
    rng_ = metric_range(d, j, gamma, "worst")
    from entlab.distinguisher import complement
    rc = metric_range(complement(d), j, gamma, "worst")
    if max(rng_.target - rng_.upper, rc.target - rc.upper) <= 0:
        return
    art = red.real_to_boolean(d, j, gamma)
    assert art.ok, art.failed_checks()
    assert art.distinguisher.is_boolean


# tightness


def test_tightness_toy():
    f = [circ.parse(s, 2, 0) for s in ("x0", "x1", "xor(x0, x1)", "and(x0, x1)")]
    c = red.tightness_demo(f).certificate
    assert c["injective"]
    assert c["min_advantage"] == F(7, 8)
    assert c["good_mass"] == 1 and c["good_gap"] == F(11, 16)
    assert c["guaranteed"] == F(1, 12)
    assert red.tightness_demo(f).ok
