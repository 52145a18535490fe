"""Verification suites: one randomized check per conversion result.

Each suite is a function ``(rng, index) -> Trial`` run on independently
seeded instances.  A trial records the exact certificate it checked and the
names of the checks that failed; a suite passes iff no trial failed.
Conversions are tested through their contrapositive: the generator builds an
instance where the stronger notion fails, and the trial certifies that the
constructed distinguisher achieves the promised gap.

Reports are canonical: trials are ordered by index and wall-clock time is
kept out of the JSON unless asked for, so a report is a function of
``(suite, trials, seed)`` alone.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import sympy as sp

from . import circuit as circ
from . import ledger as led
from . import reductions as red
from .boost import BoostConfig, metric_to_hill_boost, rounds_bound
from .dist import (
    EntropyParams, avg_to_worst_split, cond_guess_prob_avg,
    it_chain_rule_check,
)
from .distinguisher import Distinguisher, advantage_profile, complement, complement_closure, expect
from .engine import (
    decomposable_check, hill_lp, metric_range, modulus_cond, modulus_fit,
)
from .errors import BudgetExceeded, EntlabError, NoThreshold
from .generate import (
    concentrated_instance, concentrated_real, instance_rng, random_class, random_conditionals_like,
    random_boolean, random_dist, random_gamma, random_injective, random_joint,
)
from .lp_oracles import decomposable_value_lp, metric_range_lp, modulus_value_lp
from .scenario import dumps, to_jsonable

MAX_DRAWS = 200
TOY_F = ("x0", "x1", "xor(x0, x1)", "and(x0, x1)")


@dataclass
class Trial:
    index: int
    certificate: dict
    failed: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed


@dataclass
class SuiteReport:
    suite: str
    trials: int
    seed: int
    results: list
    header: dict = field(default_factory=dict)
    wall_clock: float | None = None

    @property
    def violations(self) -> list:
        return [{"index": r.index, "failed": r.failed} for r in self.results if not r.ok]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "suite": self.suite,
            "trials": self.trials,
            "seed": self.seed,
            "status": "PASS" if self.passed else "FAIL",
            "instances": len(self.results),
            "violations": self.violations,
            "header": self.header,
            "certificates": [{"index": r.index, "ok": r.ok, **r.certificate} for r in self.results],
        }
        if timing and self.wall_clock is not None:
            out["wall_clock"] = round(self.wall_clock, 3)
        return out

    def dumps(self, timing: bool = False) -> str:
        return dumps(self.to_json(timing))


def _checks(cert: dict) -> list:
    return [k for k, v in cert.items() if k.endswith("_ok") and not v]


def _trial(index, cert) -> Trial:
    return Trial(index, cert, _checks(cert))


# ---------------------------------------------------------------------------
# individual suites


def it_chain(rng, index) -> Trial:
    n = rng.randint(1, 3)
    m1, m2 = rng.randint(0, 3), rng.randint(1, 3)
    j = random_joint(rng, n, m1 + m2, 10, (m1, m2))
    res = it_chain_rule_check(j)
    return _trial(index, {"n": n, "m1": m1, "m2": m2, "guess_z1z2": res.guess_z1z2,
                          "guess_z1": res.guess_z1, "bound": (1 << m2) * res.guess_z1,
                          "chain_ok": res.holds})


AVG_WORST_DELTAS = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))


def avg_worst(rng, index) -> Trial:
    n, m = rng.randint(1, 3), rng.randint(1, 3)
    delta = AVG_WORST_DELTAS[index % 3]
    j = random_joint(rng, n, m)
    split = avg_to_worst_split(j, delta)
    # every good z has worst-case guessing probability at most avg / delta
    zm = j.z_marginal()
    per_z_ok = all(max(j.column(z)) <= split.gamma * zm[z] for z in split.good_z)
    cls = random_class(rng, n, m, 3)
    gamma = random_gamma(rng, n)
    eps = modulus_cond(j, cls, EntropyParams(gamma, 0)).value
    art = red.avg_to_worst_modulus(j, cls, EntropyParams(gamma, eps), delta)
    cert = {
        "delta": delta,
        "avg_guess": cond_guess_prob_avg(j),
        "worst_gamma": split.gamma,
        "good_mass": split.good_mass,
        "good_mass_ok": split.good_mass >= 1 - delta,
        "per_z_ok": per_z_ok,
        "gamma": gamma,
        "epsilon": eps,
        "worst_gamma_modulus": art.certificate["gamma"],
        "worst_epsilon": art.certificate["epsilon"],
        "worst_value": art.certificate["worst_value"],
        "worst_ok": art.certificate["worst_ok"],
    }
    return _trial(index, cert)


def mod_chain(rng, index) -> Trial:
    n = rng.randint(1, 3)
    m1, m2 = rng.randint(1, 2), rng.randint(1, 2)
    j3 = random_joint(rng, n, m1 + m2, 10, (m1, m2))
    cls = random_class(rng, n, m1 + m2, rng.randint(1, 6))
    gamma = random_gamma(rng, n)
    j1 = j3.marginal_z1()
    # smallest eps for which every z2-slice meets the hypothesis
    eps = max(modulus_fit(red._slice_z2(d, j3, z2), j1, gamma).value
              for d in cls for z2 in range(1 << m2))
    arts = red.modulus_chain_rule(j3, cls, EntropyParams(gamma, eps))
    failed = sorted({k for a in arts for k in a.failed_checks()})
    worst = max(arts, key=lambda a: a.certificate["modulus"])
    cert = {
        "n": n, "m1": m1, "m2": m2, "members": len(cls), "gamma": gamma, "epsilon": eps,
        "modulus": worst.certificate["modulus"],
        "modulus_bound": worst.certificate["modulus_bound"],
        "guess": max(a.certificate["guess"] for a in arts),
        "guess_bound": worst.certificate["guess_bound"],
        "engine_optimum": max(a.certificate["engine_optimum"] for a in arts),
    }
    for key in ("pieces_ok", "modulus_ok", "guess_ok", "engine_ok"):
        cert[key] = key not in failed
    return _trial(index, cert)


def dec_mod(rng, index) -> Trial:
    n, m = rng.randint(1, 3), rng.randint(1, 2)
    j = random_joint(rng, n, m)
    cls = random_class(rng, n, m, rng.randint(1, 4))
    gamma = random_gamma(rng, n)
    dec = decomposable_check(j, cls, EntropyParams(gamma, 0))
    eps = dec.value  # tightest eps at which decomposable entropy holds
    params = EntropyParams(gamma, eps)
    dec = decomposable_check(j, cls, params)
    mod = modulus_cond(j, cls, params)
    # the per-z caps themselves give a modulus witness for every member
    caps = dec.witness.caps
    worst_witness = Fraction(0)
    guess_ok = True
    for d in cls:
        y = red.decomposable_witness(d, j, caps)
        worst_witness = max(worst_witness, advantage_profile(d, j, y).modulus)
        guess_ok = guess_ok and cond_guess_prob_avg(y) <= gamma
    cert = {
        "gamma": gamma, "epsilon": eps, "decomposable_value": dec.value,
        "modulus_value": mod.value, "witness_modulus": worst_witness,
        "decomposable_holds": dec.holds,
        "modulus_ok": mod.holds,
        "witness_ok": worst_witness <= eps,
        "witness_guess_ok": guess_ok,
    }
    return _trial(index, cert)


def _violating(rng, n, m, gamma, mass=Fraction(7, 8)):
    """Concentrated instance whose worst-case modulus aggregate is positive."""
    for _ in range(MAX_DRAWS):
        j, d = concentrated_instance(rng, n, m, mass)
        value = modulus_fit(d, j, gamma, "worst").value
        if value > 0:
            return j, d, value
    raise BudgetExceeded(f"no violating instance in {MAX_DRAWS} draws")


def met_mod(rng, index) -> Trial:
    n, m = rng.randint(1, 3), rng.randint(1, 3)
    t = index % 2
    gamma = Fraction(1, 1 << rng.randint(1, n))  # gamma = 1 lets Y copy X
    j, d, value = _violating(rng, n, m, gamma, rng.choice((Fraction(3, 4), Fraction(7, 8))))
    art = red.metric_from_modulus(d, j, gamma, t)
    c = art.certificate
    return _trial(index, {"n": n, "m": m, "t": t, "gamma": gamma, "modulus": c["modulus"],
                          "advantage": c["advantage"], "advantage_bound": c["advantage_bound"],
                          "kept": c["kept"], "size": c["size"], "advantage_ok": c["advantage_ok"]})


SAMP_N = 12
SAMP_GAMMA = Fraction(1, 4)


def _mc_ok(rate, p, trials, sigmas=4):
    p = float(p)
    sd = math.sqrt(max(p * (1 - p), 0.0) / trials)
    return abs(rate - p) <= sigmas * sd + 1e-12, sd


def samp_mod(rng, index, monte_carlo: int = 0, mc_trials: int = 100_000) -> Trial:
    m = rng.randint(1, 2)
    # the sampler needs cap 2^-n <= gamma / (2 ell), i.e. a large enough violation
    max_ell = (SAMP_GAMMA * (1 << SAMP_N)) / 2
    for _ in range(MAX_DRAWS):
        mass = rng.choice((Fraction(3, 4), Fraction(7, 8), Fraction(15, 16)))
        j, d, value = _violating(rng, SAMP_N, m, SAMP_GAMMA, mass)
        if red.sampler_ell(value) <= max_ell:
            break
    else:
        raise BudgetExceeded("no instance meets the sampler entropy condition")
    core = red.core_lemma_event(d, j, SAMP_GAMMA, value)
    sampler = red.Sampler.uniform(SAMP_N, m)
    art = red.sampler_distinguisher(core.distinguisher, sampler, value, j, gamma=SAMP_GAMMA)
    c = art.certificate
    cert = {"m": m, "mass": mass, "eps": value, "ell": c["ell"], "core_ok": core.ok}
    for key in ("x_accept", "y_accept", "gap", "gap_bound", "literal_gap_bound",
                "sampler_cap", "sampler_cap_bound"):
        cert[key] = c[key]
    for key in ("x_ok", "y_ok", "gap_ok", "literal_gap_ok", "sampler_cap_ok"):
        cert[key] = c[key]
    cert["ell_ok"] = c["ell"] <= 10 ** 4
    if index < monte_carlo:
        mc = red.sampler_monte_carlo(core.distinguisher, sampler, j, c["ell"], mc_trials,
                                     seed=rng.getrandbits(64))
        x_ok, x_sd = _mc_ok(mc["x_rate"], c["x_accept"], mc_trials)
        y_ok, y_sd = _mc_ok(mc["y_rate"], c["y_accept"], mc_trials)
        cert.update({"mc_trials": mc_trials, "mc_x_rate": mc["x_rate"], "mc_y_rate": mc["y_rate"],
                     "mc_x_sd": x_sd, "mc_y_sd": y_sd, "mc_x_ok": x_ok, "mc_y_ok": y_ok})
    return _trial(index, cert)


def sq_mod(rng, index) -> Trial:
    n, m = rng.randint(1, 3), rng.randint(0, 3)
    j = random_joint(rng, n, m)
    y = random_conditionals_like(rng, j)
    cls = random_class(rng, n, m, 4, boolean=rng.random() < 0.5)
    rows = []
    ok = True
    for d in cls:
        prof = advantage_profile(d, j, y)
        rows.append((prof.modulus, prof.squared))
        ok = ok and prof.modulus ** 2 <= prof.squared and abs(prof.metric) <= prof.modulus
    worst = max(rows, key=lambda r: r[0] ** 2 - r[1])
    return _trial(index, {"n": n, "m": m, "modulus": worst[0], "squared": worst[1],
                          "cauchy_schwarz_ok": ok})


COUNT_GAMMA = Fraction(1, 8)
COUNT_COPIES = 6


def count_mod_header() -> dict:
    art = red.chernoff_check(2, Fraction(1, 2), Fraction(1, 4))
    return {"chernoff": {"n_minus_k": 2, "delta1": "1/2", "delta2": "1/4", **art.certificate}}


def _dyadic_floor(v: Fraction) -> Fraction:
    """Largest ``2^-k`` not exceeding ``v`` (``0 < v <= 1``)."""
    k = 0
    while Fraction(1, 1 << k) > v:
        k += 1
    return Fraction(1, 1 << k)


def count_mod(rng, index) -> Trial:
    n, m = rng.randint(4, 6), rng.randint(1, 2)
    j, d, value = _violating(rng, n, m, COUNT_GAMMA)
    # any level below the violation is violated too; a power of two keeps ell exact
    value = _dyadic_floor(value)
    core = red.core_lemma_event(d, j, COUNT_GAMMA, value)
    dp = core.distinguisher
    oracle = red.approx_count_distinguisher(dp, j, COUNT_GAMMA, value, "exact-oracle",
                                            oracle_gamma=Fraction(1, 4), copies=COUNT_COPIES)
    cher = red.approx_count_distinguisher(dp, j, COUNT_GAMMA, value, "chernoff-sampling")
    oc, cc = oracle.certificate, cher.certificate
    cert = {
        "n": n, "m": m, "eps_prime": value, "gamma_prime": COUNT_GAMMA,
        "copies": oc["copies"], "repeats": oc["repeats"],
        "oracle_gap": oc["gap"], "chernoff_gap": cc["gap"], "gap_bound": oc["gap_bound"],
        "ell": cc["ell"], "worst_failure": cc["worst_failure"],
        "oracle_gap_ok": oc["gap_ok"],
        "chernoff_gap_ok": cc["gap_ok"],
        "chernoff_failure_ok": cc["failure_ok"],
    }
    return _trial(index, cert)


def real_bool(rng, index) -> Trial:
    n, m = rng.randint(1, 3), rng.randint(0, 2)
    gamma = Fraction(1, 1 << rng.randint(1, n))  # gamma = 1 lets Y copy X
    for _ in range(MAX_DRAWS):
        j, d = concentrated_real(rng, n, m)
        advs = []
        for dd in (d, complement(d)):
            r = metric_range(dd, j, gamma, "worst")
            advs.append(r.target - r.upper)
        if max(advs) > 0:
            break
    else:
        raise BudgetExceeded(f"no violating instance in {MAX_DRAWS} draws")
    try:
        art = red.real_to_boolean(d, j, gamma)
    except NoThreshold as exc:
        return Trial(index, {"n": n, "m": m, "error": str(exc)}, ["threshold_exists_ok"])
    c = art.certificate
    cert = {"n": n, "m": m, "gamma": gamma}
    cert.update(c)
    return _trial(index, cert)


HILL_DELTA = Fraction(1, 8)


def met_hill(rng, index) -> Trial:
    n = rng.randint(1, 4)
    m = rng.randint(0, 6 - n)
    if index % 2:  # concentrated X against a small gamma: large game value
        n = max(n, 2)
        m = min(m, 6 - n)
        j, d = concentrated_instance(rng, n, m, flip_some=False)
        cls = complement_closure([d] + random_class(rng, n, m, rng.randint(1, 8)))
        gamma = Fraction(1, 1 << n)
    else:
        j = random_joint(rng, n, m)
        cls = random_class(rng, n, m, rng.randint(2, 16), closed=True)  # at most 32 members
        gamma = random_gamma(rng, n)
    value, _ = hill_lp(j, cls, gamma)
    want_combo = index % 2 == 1 and value > 3 * HILL_DELTA / 2
    eps = value - 3 * HILL_DELTA / 2 if want_combo else value
    res = metric_to_hill_boost(j, cls, EntropyParams(gamma, eps), HILL_DELTA,
                               BoostConfig(C=16.0))
    omega = j.nx * j.nz
    cert = {"n": n, "m": m, "members": len(cls), "gamma": gamma, "epsilon": eps,
            "game_value": value, "outcome": res.outcome,
            "expected": "combo" if want_combo else "witness",
            "agree_ok": res.outcome == ("combo" if want_combo else "witness")}
    if res.outcome == "witness":
        y = res.witness
        worst = max(abs(expect(d, j) - expect(d, y)) for d in cls)
        cert.update({"witness_guess": cond_guess_prob_avg(y), "witness_advantage": worst,
                     "witness_guess_ok": cond_guess_prob_avg(y) <= gamma,
                     "witness_ok": worst <= eps})
    else:
        bound = rounds_bound(omega, HILL_DELTA, 16.0)
        cert.update({"combo_length": res.length, "length_bound": bound,
                     "combo_advantage": res.combo_advantage,
                     "length_ok": res.length <= bound,
                     "combo_ok": res.combo_advantage >= eps})
    return _trial(index, cert)


def tight(rng, index) -> Trial:
    if index == 0:
        f = [circ.parse(s, 2, 0) for s in TOY_F]
    else:
        f = random_injective(rng)
    art = red.tightness_demo(f)
    c = art.certificate
    cert = {"f": [circ.to_text(g) for g in f]}
    for key in ("injective", "min_advantage", "good_mass", "good_gap", "split_bound",
                "guaranteed", "good_mass_ok", "good_gap_ok", "split_bound_ok",
                "guaranteed_ok", "advantage_ok"):
        cert[key] = c[key]
    return _trial(index, cert)


def core(rng, index) -> Trial:
    n, m = rng.randint(1, 3), rng.randint(1, 3)
    gamma = Fraction(1, 1 << rng.randint(1, n))  # gamma = 1 lets Y copy X
    j, d, value = _violating(rng, n, m, gamma, rng.choice((Fraction(3, 4), Fraction(7, 8))))
    art = red.core_lemma_event(d, j, gamma, value)
    cert = {"n": n, "m": m, "gamma": gamma, "choice": art.transcript["choice"]}
    cert.update(art.certificate)
    return _trial(index, cert)


def leak(rng, index) -> Trial:
    n, m = rng.randint(1, 3), rng.randint(1, 3)
    j = random_joint(rng, n, m)
    d = random_boolean(rng, n, 0)
    y = random_dist(rng, n)
    art = red.leakage_witness(d, j, y)
    c = art.certificate
    zm = j.z_marginal()
    worst_cap = max(c["caps"][z] for z in c["caps"])
    cert = {"n": n, "m": m, "eps": c["eps"], "gamma": c["gamma"],
            "avg_gap": sum((zm[z] * c["gaps"][z] for z in c["gaps"]), Fraction(0)),
            "worst_cap": worst_cap, "caps_ok": c["caps_ok"], "gaps_ok": c["gaps_ok"]}
    return _trial(index, cert)


def _ledger_reference(assumption, k, e, s, n, m, t, size_gamma):
    """Direct float arithmetic for each conversion, written out by hand."""
    lg = math.log2
    if assumption == "decomposable":
        return k, e, s
    if assumption == "samplable":
        return k - 2 * lg(1 / e) - 7, 8 * math.sqrt(e), s * e * e / 64 - size_gamma
    if assumption == "np-oracle":
        return k - lg(1 / e), 8 * math.sqrt(e), None
    if assumption == "high-entropy":
        return k - lg(1 / e), 8 * math.sqrt(e), s * 2 ** (k - n - 2) * e / lg(1 / e)
    if assumption == "none":
        return k, 2 ** t * e, s - 2 * 2 ** (m - t) * m
    if assumption == "squared":
        return k, math.sqrt(e), s
    raise ValueError(assumption)


def ledger_suite(rng, index) -> Trial:
    k = rng.randint(8, 64)
    e = Fraction(1, 1 << rng.randint(2, 12))
    s = rng.randint(10 ** 3, 10 ** 6)
    n = k + rng.randint(0, 8)
    m = rng.randint(1, 6)
    t = rng.randint(0, m)
    size_gamma = rng.randint(0, 100)
    cert = {"k": k, "eps": e, "s": s, "n": n, "m": m, "t": t, "size_Gamma": size_gamma}
    ok = True
    for row in led.full_ledger():
        got = row.evaluate(k=k, epsilon=e, s=s, n=n, m=m, t=t, size_Gamma=size_gamma)
        ref = _ledger_reference(row.assumption, k, float(e), s, n, m, t, size_gamma)
        for key, want in zip(("k", "eps", "s"), ref):
            if want is None:
                continue
            value = float(sp.N(got[key], 30))
            ok = ok and math.isclose(value, want, rel_tol=1e-12, abs_tol=1e-9)
        ok = ok and set(row.provenance) == {"k", "eps", "s"}
        cert[row.assumption] = {key: str(v) for key, v in got.items()}
    cert["ledger_ok"] = ok
    return _trial(index, cert)


SUITES = {
    "IT-CHAIN": it_chain,
    "AVG-WORST": avg_worst,
    "MOD-CHAIN": mod_chain,
    "DEC-MOD": dec_mod,
    "MET-MOD": met_mod,
    "SAMP-MOD": samp_mod,
    "SQ-MOD": sq_mod,
    "COUNT-MOD": count_mod,
    "REAL-BOOL": real_bool,
    "MET-HILL": met_hill,
    "TIGHT": tight,
    "CORE": core,
    "LEAK": leak,
    "LEDGER": ledger_suite,
}

HEADERS = {"COUNT-MOD": count_mod_header}


def _header_ok(header: dict) -> bool:
    return all(v.get("failure_ok", True) for v in header.values() if isinstance(v, dict))


def _run_one(args):
    suite, seed, index, options = args
    rng = instance_rng(suite, seed, index)
    fn = SUITES[suite]
    try:
        return fn(rng, index, **options)
    except EntlabError as exc:  # a construction refusing a valid instance is a violation
        return Trial(index, {"error": f"{type(exc).__name__}: {exc}"}, ["no_exception_ok"])


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("ENTLAB_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(suite: str, trials: int, seed: int, threads: int | None = None,
              **options) -> SuiteReport:
    """Run ``trials`` instances of ``suite``; results sorted by instance index."""
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)}")
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    threads = thread_count() if threads is None else max(1, threads)
    start = time.perf_counter()
    jobs = [(suite, seed, i, options) for i in range(trials)]
    if threads > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, trials // (4 * threads))))
    else:
        results = [_run_one(job) for job in jobs]
    results.sort(key=lambda r: r.index)
    header = HEADERS[suite]() if suite in HEADERS else {}
    if header and not _header_ok(header):
        results.insert(0, Trial(-1, {"header": "failed"}, ["header_ok"]))
    return SuiteReport(suite, trials, seed, results, to_jsonable(header),
                       time.perf_counter() - start)


# ---------------------------------------------------------------------------
# oracle equivalence of the greedy allocators


def allocator_check(rng, index) -> Trial:
    """Greedy allocators against the direct LPs on one small instance."""
    n = rng.randint(1, 3)
    m = rng.randint(0, 4 - n)
    j = random_joint(rng, n, m, 6)
    cls = random_class(rng, n, m, 3, boolean=rng.random() < 0.7)
    gamma = random_gamma(rng, n)
    bool_cls = [d for d in cls if d.is_boolean]
    mismatches = []
    for i, d in enumerate(cls):
        r = metric_range(d, j, gamma)
        if (r.lower, r.upper) != metric_range_lp(d, j, gamma):
            mismatches.append(f"metric-avg:{i}")
        if modulus_fit(d, j, gamma).value != modulus_value_lp(d, j, gamma):
            mismatches.append(f"modulus-avg:{i}")
        if modulus_fit(d, j, gamma, "worst").value != modulus_value_lp(d, j, gamma, "worst"):
            mismatches.append(f"modulus-worst:{i}")
    if decomposable_check(j, cls, EntropyParams(gamma, 0)).value != decomposable_value_lp(j, cls, gamma):
        mismatches.append("decomposable")
    cert = {"n": n, "m": m, "gamma": gamma, "members": len(cls), "boolean": len(bool_cls),
            "mismatches": mismatches, "allocators_ok": not mismatches}
    return _trial(index, cert)


def run_allocator_check(trials: int, seed: int) -> SuiteReport:
    results = [allocator_check(instance_rng("ORACLE", seed, i), i) for i in range(trials)]
    return SuiteReport("ORACLE", trials, seed, results)


# ---------------------------------------------------------------------------
# separation search


SEARCH_TARGETS = ("metric-vs-modulus", "metric-vs-decomposable")


@dataclass
class SearchResult:
    target: str
    budget: int
    seed: int
    evaluated: int
    best_gap: Fraction
    witness: dict | None

    @property
    def found(self) -> bool:
        return self.best_gap > 0

    def to_json(self) -> dict:
        return {"target": self.target, "budget": self.budget, "seed": self.seed,
                "evaluated": self.evaluated, "found": self.found,
                "best_gap": self.best_gap, "witness": self.witness}


def _separation_gap(target, j, cls, gamma):
    """``(weak, strong)`` worst values; ``strong > weak`` is a separation at
    ``eps = weak``."""
    weak = max(metric_range(d, j, gamma).distance for d in cls)
    if target == "metric-vs-modulus":
        strong = max(modulus_fit(d, j, gamma).value for d in cls)
    else:
        strong = decomposable_check(j, cls, EntropyParams(gamma, 0)).value
    return weak, strong


def search_separation(target: str, budget: int, seed: int, n: int = 2, m: int = 1,
                      denom_bits: int = 3) -> SearchResult:
    """Look for ``(X, Z)`` and a one-member class where the weaker notion holds
    and the stronger fails at the same ``(gamma, eps)``.

    The first half of the budget sweeps every boolean table against a fixed
    list of coarse joints; the rest draws joints and tables at random.
    """
    if target not in SEARCH_TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {SEARCH_TARGETS}")
    rng = instance_rng(f"search/{target}", seed)
    best_gap, best = Fraction(0), None
    evaluated = 0
    cells = (1 << n) << m
    gammas = [Fraction(i, 1 << n) for i in range(1, 1 << n)] or [Fraction(1)]

    def consider(j, d, gamma):
        nonlocal best_gap, best, evaluated
        evaluated += 1
        weak, strong = _separation_gap(target, j, [d], gamma)
        if strong - weak > best_gap:
            best_gap = strong - weak
            best = {"n": n, "m": m, "joint": [[str(p) for p in row] for row in j.probs],
                    "class": [[str(v) for v in d.flat()]], "gamma": str(gamma),
                    "epsilon": str(weak), "weak_value": str(weak), "strong_value": str(strong)}

    sweep = budget // 2 if cells <= 16 else 0
    tables = 1 << cells
    joints = []
    while evaluated < sweep:
        if not joints:
            joints = [random_joint(rng, n, m, denom_bits) for _ in range(4)]
            gamma_pick = rng.choice(gammas)
            mask = 0
        j = joints[-1]
        flat = [(mask >> i) & 1 for i in range(cells)]
        consider(j, Distinguisher.from_flat(n, m, flat, "boolean"), gamma_pick)
        mask += 1
        if mask == tables:
            joints.pop()
            mask = 0
            gamma_pick = rng.choice(gammas)
    while evaluated < budget:
        j = random_joint(rng, n, m, denom_bits)
        consider(j, random_boolean(rng, n, m), rng.choice(gammas))
    return SearchResult(target, budget, seed, evaluated, best_gap, best)
