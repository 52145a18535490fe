"""Constructive reductions between entropy notions.

Every procedure here builds a concrete object (a witness distribution or a
new distinguisher) and returns it inside a :class:`ReductionArtifact` whose
certificate holds exact rationals recomputed from that object, next to the
bound they are compared against.  Certificate keys ending in ``_ok`` are the
checks; an artifact is sound when all of them are true.

Probabilistic constructions (sampling, approximate counting) are evaluated
analytically: acceptance probabilities are CDF powers and binomial tails,
computed exactly.  Monte Carlo is only a cross-check.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import gmpy2
import numpy as np
from gmpy2 import mpq, mpz

from . import circuit as circ
from .dist import (
    ONE, ZERO, Dist, EntropyParams, Joint, avg_to_worst_split, cond_guess_prob_avg,
    conditionals, frac, guess_prob,
)
from .distinguisher import (
    Distinguisher, advantage_profile, column_expect, complement, expect, flip_select, threshold,
)
from .engine import (
    achievable_interval, metric_range, modulus_cond, modulus_fit, modulus_witness, waterfill,
    witness_column, _joint_from_columns, _require_boolean,
)
from .errors import (
    CapOutOfRange, DomainMismatch, HypothesisNotViolated, InfeasibleWitness, LTooLarge,
    NoThreshold, PreconditionFailed,
)

MAX_ELL = 10 ** 6
TRUNCATION_GATES_PER_BIT = 2  # equality test against one kept z, per z-bit


# ---------------------------------------------------------------------------
# containers


@dataclass(frozen=True)
class Sampler:
    """A samplable distribution given per z: ``conditionals[z]`` is ``Y'|Z=z``.

    ``size`` is the declared circuit size of the sampling procedure.
    """

    conditionals: tuple
    size: int = 0

    @classmethod
    def from_joint(cls, j: Joint, size: int = 0) -> "Sampler":
        return cls(tuple(conditionals(j)), size)

    @classmethod
    def uniform(cls, n: int, m: int, size: int = 0) -> "Sampler":
        u = Dist.uniform(n)
        return cls(tuple(u for _ in range(1 << m)), size)

    @property
    def n(self) -> int:
        return next(c for c in self.conditionals if c is not None).n

    @property
    def worst_cap(self) -> Fraction:
        return max(guess_prob(c) for c in self.conditionals if c is not None)

    def joint(self, z_marginal: Sequence) -> Joint:
        conds = [c if c is not None else Dist.uniform(self.n) for c in self.conditionals]
        return Joint.from_conditionals(z_marginal, conds, degenerate=any(p == 0 for p in z_marginal))

    def draw(self, z: int, shape, rng: np.random.Generator) -> np.ndarray:
        """Inverse-CDF samples of ``Y'|Z=z``."""
        cdf = np.cumsum([float(p) for p in self.conditionals[z].probs])
        u = rng.random(shape)
        return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)


@dataclass
class ReductionArtifact:
    """A constructed distinguisher or witness plus its exact certificate."""

    kind: str
    distinguisher: Distinguisher | None = None
    witness: Joint | None = None
    certificate: dict = field(default_factory=dict)
    transcript: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v for k, v in self.certificate.items() if k.endswith("_ok"))

    def failed_checks(self) -> list:
        return [k for k, v in self.certificate.items() if k.endswith("_ok") and not v]


def _cells(d: Distinguisher, j: Joint):
    """Per supported z: ``(z, P(z), column, E D(X|z), X|z)``."""
    zm = j.z_marginal()
    for z in j.support_z():
        xcond = [p / zm[z] for p in j.column(z)]
        col = d.column(z)
        yield z, zm[z], col, column_expect(col, xcond), xcond


# ---------------------------------------------------------------------------
# leakage witness


def _leak_piece(col, target, cap, tolerance):
    """Project ``target`` onto the reachable interval at ``cap``."""
    y = witness_column(col, cap, target)
    gap = abs(target - column_expect(col, y))
    return y, gap, gap <= tolerance and max(y) <= cap


def leakage_witness(d: Distinguisher, j: Joint, y: Dist, gamma=None) -> ReductionArtifact:
    """Per-z witnesses ``Y'_z`` for ``X|Z=z`` given a witness ``Y`` for ``X``.

    ``d`` reads only x (``m = 0``); ``j`` is the joint of ``(X, Z)``.  With
    ``eps = |E D(X) - E D(Y)|`` each ``Y'_z`` has guessing probability at most
    ``min(1, gamma / P(z))`` and misses ``E D(X|z)`` by at most
    ``eps / P(z)``.  The guarantee needs a boolean ``d``; for real-valued
    ones the construction is still attempted and may raise.
    """
    if d.n != j.n or d.m != 0:
        raise DomainMismatch("leakage_witness needs a distinguisher on x alone")
    if y.n != j.n:
        raise DomainMismatch("Y lives on a different domain than X")
    gamma = guess_prob(y) if gamma is None else frac(gamma)
    if guess_prob(y) > gamma:
        raise InfeasibleWitness(f"Y has guessing probability {guess_prob(y)} > {gamma}")
    col = d.column(0)
    eps = abs(column_expect(col, j.x_marginal().probs) - column_expect(col, y.probs))
    zm = j.z_marginal()
    pieces, caps, gaps, bounds = {}, {}, {}, {}
    for z in j.support_z():
        cap = min(ONE, gamma / zm[z])
        target = column_expect(col, j.column(z)) / zm[z]
        piece, gap, ok = _leak_piece(col, target, cap, eps / zm[z])
        if not ok:
            raise InfeasibleWitness(
                f"no witness for z={z}: gap {gap} exceeds {eps / zm[z]}", witness=z
            )
        pieces[z], caps[z], gaps[z], bounds[z] = piece, cap, gap, eps / zm[z]
    witness = _joint_from_columns(j, pieces)
    cert = {
        "eps": eps,
        "gamma": gamma,
        "caps": caps,
        "gaps": gaps,
        "gap_bounds": bounds,
        "caps_ok": all(max(pieces[z]) <= caps[z] for z in pieces),
        "gaps_ok": all(gaps[z] <= bounds[z] for z in pieces),
    }
    return ReductionArtifact("leakage", witness=witness, certificate=cert,
                             transcript={"projection": "waterfill mix at cap min(1, gamma/P(z))"})


# ---------------------------------------------------------------------------
# modulus chain rule


def _slice_z2(d: Distinguisher, j3: Joint, z2: int) -> Distinguisher:
    m1, _ = j3.z_split
    return d.slice_z([j3.pair(z1, z2) for z1 in range(1 << m1)])


def modulus_chain_rule(j3: Joint, cls: Sequence[Distinguisher], params: EntropyParams) -> list:
    """Witnesses for ``X | (Z1, Z2)`` from modulus entropy of ``X | Z1``.

    For each member ``D`` and each ``z2`` the slice ``D(., ., z2)`` has a
    witness ``Y^{z2}`` against ``X | Z1``; splitting each ``Y^{z2}|z1``
    along ``Z2|z1`` gives pieces ``Y'_{z1,z2}`` that are assembled into one
    ``(Y, Z1, Z2)``.  Returns one artifact per member.
    """
    if j3.z_split is None:
        raise DomainMismatch("the joint needs a (Z1, Z2) split")
    _require_boolean(cls)
    gamma, eps = params.gamma, params.epsilon
    m1, m2 = j3.z_split
    j1 = j3.marginal_z1()
    zm1 = j1.z_marginal()
    zm = j3.z_marginal()
    factor = 1 << m2
    out = []
    for d in cls:
        pieces, gaps = {}, {}
        caps_used = {}
        piece_ok = True
        for z2 in range(1 << m2):
            dz2 = _slice_z2(d, j3, z2)
            fit = modulus_fit(dz2, j1, gamma, "avg")
            if fit.value > eps:
                raise PreconditionFailed(
                    f"slice z2={z2} violates modulus entropy of X|Z1 ({fit.value} > {eps})",
                    witness=dz2,
                )
            y_z2 = modulus_witness(dz2, j1, fit)
            for z1 in j1.support_z():
                z = j3.pair(z1, z2)
                if not zm[z]:
                    continue
                col = d.column(z)
                ycol = [y_z2.probs[x][z1] / zm1[z1] for x in range(j3.nx)]
                xcol = [j1.probs[x][z1] / zm1[z1] for x in range(j3.nx)]
                slice_gap = abs(column_expect(col, xcol) - column_expect(col, ycol))
                p = zm[z] / zm1[z1]
                cap = min(ONE, fit.caps[z1] / p)
                target = column_expect(col, j3.column(z)) / zm[z]
                piece, gap, ok = _leak_piece(col, target, cap, slice_gap / p)
                piece_ok = piece_ok and ok
                pieces[z], gaps[z], caps_used[z] = piece, gap, cap
        witness = _joint_from_columns(j3, pieces)
        aggregate = sum((zm[z] * gaps[z] for z in gaps), ZERO)
        cap_mass = sum((zm[z] * caps_used[z] for z in caps_used), ZERO)
        guess = cond_guess_prob_avg(witness)
        # independent re-check through the engine
        profile = advantage_profile(d, j3, witness)
        engine_fit = modulus_fit(d, j3, min(ONE, factor * gamma), "avg")
        cert = {
            "m2": m2,
            "modulus": aggregate,
            "modulus_bound": factor * eps,
            "guess": guess,
            "cap_mass": cap_mass,
            "guess_bound": factor * gamma,
            "engine_modulus": profile.modulus,
            "engine_optimum": engine_fit.value,
            "pieces_ok": piece_ok,
            "modulus_ok": aggregate <= factor * eps,
            "guess_ok": guess <= cap_mass <= factor * gamma,
            "engine_ok": profile.modulus == aggregate and engine_fit.value <= factor * eps,
        }
        out.append(ReductionArtifact("chain-rule", distinguisher=d, witness=witness,
                                     certificate=cert, transcript={"caps": caps_used}))
    return out


# ---------------------------------------------------------------------------
# decomposable -> modulus witness


def decomposable_witness(d: Distinguisher, j: Joint, caps: Sequence) -> Joint:
    """``Y|Z=z`` fitted to ``E D(X|z)`` under the per-z cap ``caps[z]``."""
    pieces = {z: witness_column(col, caps[z], a) for z, _, col, a, _ in _cells(d, j)}
    return _joint_from_columns(j, pieces)


# ---------------------------------------------------------------------------
# average-case to worst-case modulus


def avg_to_worst_modulus(j: Joint, cls, params: EntropyParams, delta) -> ReductionArtifact:
    """Average-case modulus entropy at ``(gamma, eps)`` gives worst-case modulus
    entropy at ``(gamma / delta, eps + delta)``; re-checked by the engine."""
    delta = frac(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    avg = modulus_cond(j, cls, params)
    if not avg.holds:
        raise PreconditionFailed("average-case modulus entropy fails", witness=avg.witness)
    gamma2 = min(ONE, params.gamma / delta)
    eps2 = min(ONE, params.epsilon + delta)  # past 1 the claim is vacuous
    worst = modulus_cond(j, cls, EntropyParams(gamma2, eps2), "worst")
    cert = {
        "gamma": gamma2,
        "epsilon": eps2,
        "avg_value": avg.value,
        "worst_value": worst.value,
        "worst_ok": worst.holds,
    }
    return ReductionArtifact("avg-to-worst", certificate=cert)


# ---------------------------------------------------------------------------
# core lemma


def _upper_at(col, gamma) -> Fraction:
    return achievable_interval(col, gamma).upper


def event_probability(d: Distinguisher, j: Joint, gamma, margin) -> Fraction:
    """``P_{(x,z)~(X,Z)}[D(x, z) - max_{cap gamma} E D(Y|z, z) >= margin]``."""
    gamma, margin = frac(gamma), frac(margin)
    total = ZERO
    for z, _, col, _, _ in _cells(d, j):
        up = _upper_at(col, gamma)
        xs = j.column(z)
        total += sum((xs[x] for x, v in enumerate(col) if v - up >= margin), ZERO)
    return total


def violation_signs(d: Distinguisher, j: Joint, gamma) -> list:
    """Per z: keep if ``E D(X|z)`` sits above the reachable interval at
    ``gamma``, flip if below, zero if inside (or z has no mass)."""
    signs = [0] * j.nz
    for z, _, col, a, _ in _cells(d, j):
        iv = achievable_interval(col, gamma)
        signs[z] = 1 if a > iv.upper else (-1 if a < iv.lower else 0)
    return signs


def signed_distinguisher(d: Distinguisher, j: Joint, gamma) -> Distinguisher:
    """``D`` where X beats every capped Y, ``1 - D`` where X undershoots, 0 elsewhere."""
    return flip_select(d, violation_signs(d, j, gamma))


def core_lemma_event(d: Distinguisher, j: Joint, gamma, eps) -> ReductionArtifact:
    """From a modulus violation to a one-sided pointwise event.

    Hypothesis: every Y with per-z guessing probability ``gamma`` leaves
    ``E_z |eps_D(z)| >= eps``.  Then ``D' = D`` or ``D' = 1 - D`` satisfies
    ``P[D'(X, Z) - max_Y E D'(Y|z, z) >= eps/4] >= eps^2/16``; the better of
    the two is returned.
    """
    gamma, eps = frac(gamma), frac(eps)
    _require_boolean([d])
    if eps <= 0:
        raise ValueError("eps must be positive")
    value = modulus_fit(d, j, gamma, "worst").value
    if value < eps:
        raise HypothesisNotViolated(
            f"modulus aggregate {value} is below {eps}; nothing to extract", witness=value
        )
    margin = eps / 4
    p_d = event_probability(d, j, gamma, margin)
    dc = complement(d)
    p_c = event_probability(dc, j, gamma, margin)
    choice, best, p_star = ("D", d, p_d) if p_d >= p_c else ("D^c", dc, p_c)
    signs = violation_signs(d, j, gamma)
    flipped = flip_select(d, signs)
    p_flip = event_probability(flipped, j, gamma, margin)
    cert = {
        "modulus": value,
        "eps": eps,
        "p_D": p_d,
        "p_Dc": p_c,
        "p_star": p_star,
        "p_star_bound": eps * eps / 16,
        "p_flip": p_flip,
        "p_flip_bound": eps * eps / 8,
        "p_star_ok": p_star >= eps * eps / 16,
        "p_flip_ok": p_flip >= eps * eps / 8,
    }
    return ReductionArtifact("core-lemma", distinguisher=best, certificate=cert,
                             transcript={"choice": choice, "signs": signs})


# ---------------------------------------------------------------------------
# heavy truncation


def heavy_truncation(d_prime: Distinguisher, profile: Sequence, t: int) -> Distinguisher:
    """Keep ``D'`` on the ``2^(m-t)`` z-values with the largest weights.

    ``profile[z]`` is the weight ``P(z) eps'(z)``; ties go to the smaller z.
    Other z-values are mapped to 0.  Selecting a z costs about ``2m`` gates
    (an equality test), which is added to the size.
    """
    m = d_prime.m
    if len(profile) != 1 << m:
        raise DomainMismatch("need one weight per z value")
    if not 0 <= t <= m:
        raise ValueError(f"t must lie in [0, {m}]")
    keep_n = 1 << (m - t)
    order = sorted(range(1 << m), key=lambda z: (-frac(profile[z]), z))
    keep = frozenset(order[:keep_n])
    vals = tuple(tuple(v if z in keep else ZERO for z, v in enumerate(row)) for row in d_prime.values)
    extra = 0 if t == 0 else TRUNCATION_GATES_PER_BIT * keep_n * m
    return Distinguisher(d_prime.n, m, vals, d_prime.kind, d_prime.size + extra,
                         ("truncate", tuple(sorted(keep)), d_prime.provenance))


def metric_from_modulus(d: Distinguisher, j: Joint, gamma, t: int) -> ReductionArtifact:
    """Modulus violation of ``d`` to a metric violation of a truncated ``D'``.

    ``D'`` is the signed distinguisher, truncated to the heaviest
    ``2^(m-t)`` z-values; its advantage against every Y with per-z cap
    ``gamma`` is at least ``2^-t`` times the modulus aggregate of ``d``.
    """
    gamma = frac(gamma)
    _require_boolean([d])
    fit = modulus_fit(d, j, gamma, "worst")
    zm = j.z_marginal()
    weights = [zm[z] * fit.penalties.get(z, ZERO) for z in range(j.nz)]
    signed = signed_distinguisher(d, j, gamma)
    truncated = heavy_truncation(signed, weights, t)
    rng = metric_range(truncated, j, gamma, "worst")
    adv = rng.target - rng.upper
    bound = fit.value / (1 << t)
    kept = truncated.provenance[1]
    cert = {
        "modulus": fit.value,
        "t": t,
        "kept": len(kept),
        "advantage": adv,
        "advantage_bound": bound,
        "size": truncated.size,
        "advantage_ok": adv >= bound,
    }
    return ReductionArtifact("heavy-truncation", distinguisher=truncated, certificate=cert,
                             transcript={"kept": list(kept), "weights": weights})


# ---------------------------------------------------------------------------
# sampler distinguisher


def sampler_ell(eps) -> int:
    """``ceil(64 / eps^2) - 1``."""
    eps = frac(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.ceil(64 / (eps * eps)) - 1


def _strict_cdfs(col, probs) -> dict:
    """``v -> P[D'(Y') < v]`` for every value ``v`` in ``col``."""
    mass = {}
    for v, p in zip(col, probs):
        if p:
            mass[v] = mass.get(v, ZERO) + p
    out, below = {}, ZERO
    for v in sorted(set(col)):
        out[v] = below
        below += mass.get(v, ZERO)
    return out


def sampler_acceptance(d_prime: Distinguisher, sampler: Sampler, ell: int) -> list:
    """``acc[x][z] = P[D'(x, z) > max of ell samples of D'(Y'|z, z)]``."""
    acc = [[ZERO] * (1 << d_prime.m) for _ in range(1 << d_prime.n)]
    for z in range(1 << d_prime.m):
        cond = sampler.conditionals[z]
        if cond is None:
            continue
        col = d_prime.column(z)
        powers = {v: f ** ell for v, f in _strict_cdfs(col, cond.probs).items()}
        for x, v in enumerate(col):
            acc[x][z] = powers[v]
    return acc


def sampler_distinguisher(d_prime: Distinguisher, sampler: Sampler, eps, j: Joint,
                          gamma=None) -> ReductionArtifact:
    """``D''(x, z) = [D'(x, z) > max_i D'(y_i, z)]`` with ``ell`` samples of ``Y'|z``.

    ``eps`` is the violation level that ``D'`` came from and fixes
    ``ell = ceil(64/eps^2) - 1``.  Ties reject.  The certificate holds the
    exact acceptance probabilities on both sides; when ``gamma`` (the cap
    the violation was measured at) is given, the sampler cap condition
    ``cap(Y') <= gamma / (2 ell)`` under which the X side is guaranteed is
    reported too.
    """
    eps = frac(eps)
    ell = sampler_ell(eps)
    if ell > MAX_ELL:
        raise LTooLarge(f"ell = {ell} exceeds {MAX_ELL}; use a larger eps")
    if d_prime.n != j.n or d_prime.m != j.m or sampler.n != j.n:
        raise DomainMismatch("distinguisher, sampler and joint must share a domain")
    acc = sampler_acceptance(d_prime, sampler, ell)
    zm = j.z_marginal()
    x_side = sum((j.probs[x][z] * acc[x][z] for x in range(j.nx) for z in range(j.nz)
                  if j.probs[x][z] and acc[x][z]), ZERO)
    y_side = ZERO
    for z in j.support_z():
        probs = sampler.conditionals[z].probs
        y_side += zm[z] * sum((probs[x] * acc[x][z] for x in range(j.nx) if probs[x] and acc[x][z]), ZERO)
    gap = x_side - y_side
    e2 = eps * eps
    size = (ell + 1) * (d_prime.size + sampler.size)
    dd = Distinguisher(j.n, j.m, tuple(map(tuple, acc)), "randomized", size,
                       ("sampler", ell, d_prime.provenance))
    cert = {
        "ell": ell,
        "x_accept": x_side,
        "y_accept": y_side,
        "gap": gap,
        "x_bound": e2 / 32,
        "y_bound": Fraction(1, ell + 1),
        "gap_bound": e2 / 64,
        "literal_gap_bound": (e2 / 64) ** 2 / 64,
        "size": size,
        "x_ok": x_side >= e2 / 32,
        "y_ok": y_side <= Fraction(1, ell + 1) <= e2 / 64,
        "gap_ok": gap >= e2 / 64,
        "literal_gap_ok": gap >= (e2 / 64) ** 2 / 64,
    }
    if gamma is not None:
        cert["sampler_cap"] = sampler.worst_cap
        cert["sampler_cap_bound"] = frac(gamma) / (2 * ell)
        cert["sampler_cap_ok"] = sampler.worst_cap <= frac(gamma) / (2 * ell)
    return ReductionArtifact("sampler", distinguisher=dd, certificate=cert,
                             transcript={"ell": ell, "tie_rule": "strict"})


def sampler_monte_carlo(d_prime: Distinguisher, sampler: Sampler, j: Joint, ell: int,
                        trials: int, seed: int, chunk: int = 2048) -> dict:
    """Estimate both acceptance rates by direct simulation (Philox stream).

    Each trial draws ``(x, z)`` (from X, or from Y' on the second side) and
    ``ell`` fresh samples of ``D'(Y'|z, z)``; only the pushforward of Y'
    through ``D'`` is sampled, which is all the test looks at.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    table = np.array([[float(v) for v in row] for row in d_prime.values])  # nx x nz
    pushed = {}
    for z in j.support_z():
        mass = {}
        for x, p in enumerate(sampler.conditionals[z].probs):
            if p:
                v = float(d_prime.values[x][z])
                mass[v] = mass.get(v, 0.0) + float(p)
        vals = np.array(sorted(mass))
        pushed[z] = (vals, np.cumsum([mass[v] for v in vals]))
    flat = np.array([float(p) for row in j.probs for p in row])
    zm = np.array([float(p) for p in j.z_marginal()])

    def max_of_draws(z, count):
        vals, cdf = pushed[z]
        idx = np.searchsorted(cdf, rng.random((count, ell)), side="right")
        return vals[np.minimum(idx, len(vals) - 1).max(axis=1)]

    def run(draw_x):
        hits, done = 0, 0
        while done < trials:
            k = min(chunk, trials - done)
            xs, zs = draw_x(k)
            for z in np.unique(zs):
                sel = zs == z
                best = max_of_draws(int(z), int(sel.sum()))
                hits += int((table[xs[sel], z] > best).sum())
            done += k
        return hits / trials

    def from_x(k):
        a = rng.choice(len(flat), size=k, p=flat / flat.sum())
        return a // j.nz, a % j.nz

    def from_y(k):
        zs = rng.choice(j.nz, size=k, p=zm / zm.sum())
        xs = np.empty(k, dtype=np.int64)
        for z in np.unique(zs):
            sel = zs == z
            xs[sel] = sampler.draw(int(z), int(sel.sum()), rng)
        return xs, zs

    return {"x_rate": run(from_x), "y_rate": run(from_y), "trials": trials}


# ---------------------------------------------------------------------------
# approximate counting


def binom_cdf(ell: int, c: int, M: int, k: int) -> mpq:
    """Exact ``P[B <= k]`` for ``B ~ Bin(ell, c / M)``.

    The common factor ``(M - c)^(ell - k)`` is pulled out of the sum so the
    running terms stay ``O(k log M)`` bits long.
    """
    if k < 0:
        return mpq(0)
    if k >= ell or c == 0:
        return mpq(1)
    if c == M:
        return mpq(0)
    ell, c, M, k = int(ell), int(c), int(M), int(k)
    rest = M - c
    # term_i = C(ell, i) c^i rest^(k - i)
    term = mpz(rest) ** k
    total = mpz(0)
    for i in range(k + 1):
        total += term
        if i < k:
            term = term * (ell - i) * c // ((i + 1) * rest)
    return mpq(total * mpz(rest) ** (ell - k), mpz(M) ** ell)


def _ceil_q(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def _floor_q(q: Fraction) -> int:
    return q.numerator // q.denominator


def estimator_failure(ell: int, c: int, n: int, gamma_prime, delta1) -> mpq:
    """``P[|h - gamma' c| > delta1]`` for ``h = 2^n gamma' B / ell``,
    ``B ~ Bin(ell, c / 2^n)``."""
    gamma_prime, delta1 = frac(gamma_prime), frac(delta1)
    ratio = (1 << n) * gamma_prime
    center = gamma_prime * c
    # |ratio B/ell - center| > delta1  <=>  B < lo  or  B > hi
    lo = (center - delta1) * ell / ratio
    hi = (center + delta1) * ell / ratio
    below = binom_cdf(ell, c, 1 << n, _ceil_q(lo) - 1)
    above = 1 - binom_cdf(ell, c, 1 << n, _floor_q(hi))
    return below + above


def chernoff_ell(ratio, delta1, delta2) -> int:
    """Smallest integer ``ell > 4 ratio / delta1^2 * log2(1/delta2)``.

    Exact when ``1/delta2`` is a power of two; otherwise the logarithm is
    evaluated with 512-bit precision, far beyond any gap that matters.
    """
    A = 4 * frac(ratio) / (frac(delta1) ** 2)
    B = 1 / frac(delta2)
    if B <= 1:
        return 1
    if B.denominator == 1 and B.numerator & (B.numerator - 1) == 0:
        bound = A * (B.numerator.bit_length() - 1)
        return _floor_q(bound) + 1
    with gmpy2.context(gmpy2.get_context(), precision=512):
        bound = gmpy2.mpfr(mpq(A.numerator, A.denominator)) * gmpy2.log2(
            gmpy2.mpfr(mpq(B.numerator, B.denominator)))
        return int(gmpy2.floor(bound)) + 1


def chernoff_check(n_minus_k: int, delta1, delta2, k: int = 4) -> ReductionArtifact:
    """Worst estimator failure over every count ``c <= 2^k`` at the Chernoff-bound ``ell``."""
    delta1, delta2 = frac(delta1), frac(delta2)
    n = k + n_minus_k
    gamma_prime = Fraction(1, 1 << k)
    ell = chernoff_ell(1 << n_minus_k, delta1, delta2)
    fails = [estimator_failure(ell, c, n, gamma_prime, delta1) for c in range((1 << k) + 1)]
    worst = max(fails)
    cert = {
        "ell": ell,
        "worst_failure": _fraction(worst),
        "failure_bound": 2 * delta2,
        "failure_ok": worst <= 2 * delta2,
    }
    return ReductionArtifact("chernoff", certificate=cert, transcript={"n": n, "k": k})


def majority_repeats(p_correct, delta) -> int:
    """Smallest odd ``r`` with ``P[Bin(r, p_correct) <= (r-1)/2] <= delta``."""
    p_correct, delta = frac(p_correct), frac(delta)
    if p_correct <= Fraction(1, 2):
        raise ValueError("majority amplification needs p_correct > 1/2")
    wrong = 1 - p_correct
    r = 1
    while True:
        fail = sum((Fraction(math.comb(r, i)) * p_correct ** i * wrong ** (r - i)
                    for i in range((r - 1) // 2 + 1)), ZERO)
        if fail <= delta:
            return r
        r += 2


def min_copies(gamma) -> int:
    """Smallest ``k`` with ``(1 + gamma)^k >= 4``: k AND-copies turn a factor-4
    count of ``c^k`` into a factor ``4^(1/k) <= 1 + gamma`` count of ``c``."""
    gamma = frac(gamma)
    k = 1
    while (1 + gamma) ** k < 4:
        k += 1
    return k


def _counts(d: Distinguisher) -> list:
    return [sum(1 for v in d.column(z) if v) for z in range(1 << d.m)]


def _fraction(q) -> Fraction:
    """mpq to Fraction; mpq is already reduced, so skip the (slow) gcd."""
    if isinstance(q, Fraction):
        return q
    n, d = int(q.numerator), int(q.denominator)
    try:
        return Fraction(n, d, _normalize=False)
    except TypeError:  # keyword dropped in newer Pythons
        return Fraction(n, d)


def _x_mass(d: Distinguisher, j: Joint) -> list:
    return [sum((j.probs[x][z] for x in range(j.nx) if d.values[x][z]), ZERO) for z in range(j.nz)]


def _source_circuit(d: Distinguisher):
    """The circuit ``d`` was tabulated from, if its provenance is DSL text."""
    if not isinstance(d.provenance, str):
        return None
    try:
        return circ.parse(d.provenance, d.n, d.m)
    except Exception:
        return None


def approx_count_distinguisher(d_prime: Distinguisher, j: Joint, gamma_prime, eps_prime,
                               mode: str = "exact-oracle", *, ell: int | None = None,
                               oracle_gamma=Fraction(1, 4), copies: int | None = None,
                               gamma_y=None) -> ReductionArtifact:
    """``D''(x, z) = [D'(x, z) > h(z) + eps'/8]`` with ``h(z)`` estimating
    ``gamma' |D'(., z)|``.

    For boolean ``D'`` this accepts iff ``D'(x, z) = 1`` and
    ``h(z) < 1 - eps'/8``.  The gap is measured against every Y with per-z
    cap ``gamma_y`` (default ``gamma' eps'^2 / 64``).

    ``chernoff-sampling``: ``h = 2^n gamma' B / ell`` with ``B`` the number of
    hits among ``ell`` uniform samples; acceptance is an exact binomial CDF.

    ``exact-oracle``: an exact count, answered by an oracle that is only
    promised to land within a factor 4 of ``c^k`` for ``k`` AND-copies, and
    only with probability ``1 - delta`` after majority amplification.  The
    adversary picks, per z, whatever allowed acceptance probability hurts the
    gap most.
    """
    _require_boolean([d_prime])
    if d_prime.n != j.n or d_prime.m != j.m:
        raise DomainMismatch("distinguisher and joint differ in shape")
    gamma_prime, eps_prime = frac(gamma_prime), frac(eps_prime)
    if gamma_prime * j.nx < 1:
        raise CapOutOfRange("gamma' below 2^-n")
    delta = eps_prime ** 2 / 64
    gamma_y = gamma_prime * delta if gamma_y is None else frac(gamma_y)
    counts = _counts(d_prime)
    xmass = _x_mass(d_prime, j)
    cut = 1 - eps_prime / 8
    cert = {"mode": mode, "gamma_y": gamma_y, "eps_prime": eps_prime}
    transcript = {"counts": counts}
    acc = [ONE] * j.nz

    if mode == "chernoff-sampling":
        ratio = j.nx * gamma_prime
        delta1, delta2 = eps_prime / 8, delta / 2
        ell_proof = chernoff_ell(ratio, delta1, delta2)
        ell = ell_proof if ell is None else int(ell)
        if ell > MAX_ELL:
            raise LTooLarge(f"ell = {ell} exceeds {MAX_ELL}")
        # h < cut  <=>  B < ell * cut / ratio
        top = _ceil_q(ell * cut / ratio) - 1
        failures = []
        for z in range(j.nz):
            acc[z] = binom_cdf(ell, counts[z], j.nx, top)
            if gamma_prime * counts[z] <= 1:
                failures.append(estimator_failure(ell, counts[z], j.n, gamma_prime, delta1))
        worst = max(failures) if failures else mpq(0)
        cert.update({
            "ell": ell,
            "ell_chernoff": ell_proof,
            "worst_failure": _fraction(worst),
            "failure_bound": delta,
            "failure_ok": worst <= delta,
        })
        transcript["accept_below_hits"] = top + 1
    elif mode == "exact-oracle":
        oracle_gamma = frac(oracle_gamma)
        k = min_copies(oracle_gamma) if copies is None else int(copies)
        reps = majority_repeats(Fraction(3, 4), delta)
        limit = (cut / gamma_prime) ** k  # accept iff the answer M is below this
        choices = []
        for z in range(j.nz):
            c = counts[z]
            lo_acc, hi_acc = ZERO, ONE
            if c:
                ck = Fraction(c) ** k
                can_accept = ck / 4 < limit
                can_reject = limit < 4 * ck
                if not can_reject:
                    lo_acc = 1 - delta
                elif not can_accept:
                    hi_acc = delta
            # coefficient of a_z in the gap
            coef = xmass[z] - j.z_marginal()[z] * min(ONE, gamma_y * c)
            acc[z] = lo_acc if coef >= 0 else hi_acc
            choices.append((str(lo_acc), str(hi_acc)))
        base = _source_circuit(d_prime)
        and_size = k * d_prime.size + k - 1
        if base is not None:
            and_size = circ.size(circ.and_of_copies(base, k))
        maj_size = circ.size(circ.majority(reps))
        cert.update({
            "copies": k,
            "copies_cover_gamma": (1 + oracle_gamma) ** k >= 4,
            "window_factor": "4^(1/copies)",
            "repeats": reps,
            "and_size": and_size,
            "majority_size": maj_size,
            "oracle_failure": delta,
        })
        transcript["allowed_acceptance"] = choices
    else:
        raise ValueError(f"unknown mode {mode!r}")

    # sums in mpq: chernoff acceptances carry ell * n-bit denominators
    accq = [mpq(a) for a in acc]
    zm = j.z_marginal()
    x_side = sum((mpq(xmass[z]) * accq[z] for z in range(j.nz)), mpq(0))
    y_side = sum((mpq(zm[z] * min(ONE, gamma_y * counts[z])) * accq[z] for z in j.support_z()), mpq(0))
    gap = _fraction(x_side - y_side)
    x_side, y_side = _fraction(x_side), _fraction(y_side)
    acc = [_fraction(a) for a in accq]
    vals = tuple(tuple(acc[z] if d_prime.values[x][z] else ZERO for z in range(j.nz))
                 for x in range(j.nx))
    dd = Distinguisher(j.n, j.m, vals, "boolean" if all(a in (0, 1) for a in acc) else "randomized",
                       d_prime.size + 1, ("approx-count", mode, d_prime.provenance))
    cert.update({
        "x_accept": x_side,
        "y_accept_max": y_side,
        "gap": gap,
        "gap_bound": delta,
        "gap_ok": gap >= delta,
    })
    return ReductionArtifact("approx-count", distinguisher=dd, certificate=cert, transcript=transcript)


# ---------------------------------------------------------------------------
# real-valued to boolean


def real_to_boolean(d_real: Distinguisher, j: Joint, gamma, eps=None) -> ReductionArtifact:
    """Threshold a real-valued distinguisher without losing advantage.

    Advantage is measured against every Y with per-z guessing probability
    ``gamma``.  The sign is fixed first (``D`` or ``1 - D``, whichever has the
    larger advantage); then every distinct value is tried as a threshold and
    the best one is kept (smallest on ties).
    """
    gamma = frac(gamma)

    def adv(dd):
        rng = metric_range(dd, j, gamma, "worst")
        return rng.target - rng.upper

    candidates = [("D", d_real), ("D^c", complement(d_real))]
    scored = [(adv(dd), name, dd) for name, dd in candidates]
    real_adv, orient, oriented = max(scored, key=lambda s: (s[0], s[1] == "D"))
    eps = real_adv if eps is None else frac(eps)
    if real_adv < eps or real_adv <= 0:
        raise NoThreshold(f"real-valued advantage {real_adv} does not reach {eps}")
    values = sorted({v for row in oriented.values for v in row} | {ZERO})
    top = values[-1]
    best = None
    scan = []
    for t in values:
        if t >= top:
            continue
        dd = threshold(oriented, t)
        a = adv(dd)
        scan.append((t, a))
        if best is None or a > best[1]:
            best = (t, a, dd)
    if best is None or best[1] < eps:
        raise NoThreshold(f"no threshold reaches advantage {eps}")
    t, a, dd = best
    # the capped waterfill for D also maximizes every threshold of D
    preserved = True
    for z, p, col, _, _ in _cells(oriented, j):
        y = waterfill(col, gamma, True)
        bcol = dd.column(z)
        if column_expect(bcol, y) != _upper_at(bcol, gamma):
            preserved = False
    cert = {
        "orientation": orient,
        "real_advantage": real_adv,
        "threshold": t,
        "advantage": a,
        "eps": eps,
        "advantage_ok": a >= eps,
        "not_worse_ok": a >= real_adv,
        "max_set_ok": preserved,
    }
    return ReductionArtifact("real-to-boolean", distinguisher=dd, certificate=cert,
                             transcript={"scan": scan})


# ---------------------------------------------------------------------------
# tightness example


def _rename_inputs(text: str) -> str:
    return re.sub(r"\bx(\d+)", r"z\1", text)


def tightness_demo(f: Sequence[circ.Circuit], avg_cap=Fraction(1, 8), delta=Fraction(1, 3)) -> ReductionArtifact:
    """Min-entropy versus a simple equality test.

    ``f`` lists one single-output circuit per output bit, each over the
    ``m`` input bits (written as x-bits).  The joint is ``(f(U), U)`` with
    ``U`` uniform, the test is ``D(y, u) = [f(u) = y]``.  The certificate
    holds the exact minimum advantage over Y with average cap ``avg_cap``,
    and the split bound: on the optimal Y the z-values with cap at most
    ``avg_cap / delta`` carry mass ``>= 1 - delta`` and each has gap
    ``>= 1 - avg_cap / delta``.
    """
    f = list(f)
    n = len(f)
    m = max(c.n + c.m for c in f)
    if any(c.m for c in f):
        raise DomainMismatch("write the output circuits over x-bits only")
    outputs = [sum(circ.evaluate(c, u, 0) << i for i, c in enumerate(f)) for u in range(1 << m)]
    injective = len(set(outputs)) == len(outputs)
    text = None
    for i, c in enumerate(f):
        eq = f"not(xor(x{i}, {_rename_inputs(circ.to_text(c))}))"
        text = eq if text is None else f"and({text}, {eq})"
    d = Distinguisher.from_circuit(circ.parse(text, n, m))
    table = [[ZERO] * (1 << m) for _ in range(1 << n)]
    for u, y in enumerate(outputs):
        table[y][u] = Fraction(1, 1 << m)
    j = Joint.from_table(table)
    avg_cap, delta = frac(avg_cap), frac(delta)
    rng = metric_range(d, j, avg_cap, "avg")
    min_adv = rng.target - rng.upper
    # the Y attaining the minimum: full waterfill at the optimizing caps
    worst_y = _joint_from_columns(j, {z: waterfill(d.column(z), rng.caps_up[z]) for z in j.support_z()})
    split = avg_to_worst_split(worst_y, delta)
    good_gap = min(_zgap(d, j, worst_y, z) for z in split.good_z)
    bound = split.good_mass * good_gap - delta
    guaranteed = (1 - delta) * (1 - avg_cap / delta) - delta
    cert = {
        "injective": injective,
        "avg_cap": avg_cap,
        "min_advantage": min_adv,
        "worst_y_guess": cond_guess_prob_avg(worst_y),
        "split_gamma": split.gamma,
        "good_mass": split.good_mass,
        "good_gap": good_gap,
        "split_bound": bound,
        "good_mass_bound": 1 - delta,
        "good_gap_bound": 1 - avg_cap / delta,
        "guaranteed": guaranteed,
        "target": Fraction(1, 12),
        "good_mass_ok": split.good_mass >= 1 - delta,
        "good_gap_ok": good_gap >= 1 - avg_cap / delta,
        "split_bound_ok": bound >= guaranteed,
        "guaranteed_ok": guaranteed >= Fraction(1, 12),
        "advantage_ok": min_adv >= Fraction(1, 12),
    }
    return ReductionArtifact("tightness", distinguisher=d, witness=worst_y, certificate=cert,
                             transcript={"outputs": outputs, "circuit": text})


def _zgap(d: Distinguisher, jx: Joint, jy: Joint, z: int) -> Fraction:
    """Per-z gap ``E D(X|z, z) - E D(Y|z, z)``."""
    zm = jx.z_marginal()[z]
    col = d.column(z)
    return (column_expect(col, jx.column(z)) - column_expect(col, jy.column(z))) / zm
