"""Exact decision procedures for min, metric, modulus, HILL and decomposable entropy.

Everything is phrased through guessing probabilities.  ``Y`` has conditional
min-entropy at least ``k`` on average iff ``sum_z P(z) m_z <= gamma`` where
``m_z = max_x P(Y=x | Z=z)``, so average-case questions reduce to choosing
one cap ``m_z`` per z.  For a fixed column of distinguisher values the set of
reachable expectations under cap ``m`` is an interval whose endpoints are
found by waterfilling; as functions of ``m`` the upper endpoint is concave and
the lower one convex, both piecewise linear with breakpoints at ``m = 1/j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dist import ONE, ZERO, Dist, EntropyParams, Joint, cond_guess_prob_avg, frac
from .distinguisher import Distinguisher, advantage_profile, column_expect, expect
from .errors import CapOutOfRange, DomainMismatch, NonBooleanClass
from .lp import Model
from .piecewise import PiecewiseLinear, allocate, constant, pl_max, top_up

NOTIONS = (
    "min", "metric-uncond", "metric-worst", "metric-avg", "modulus-avg",
    "modulus-worst", "hill-avg", "decomposable", "squared",
)


# ---------------------------------------------------------------------------
# single-column primitives


@dataclass(frozen=True)
class AchievableInterval:
    """``{E D(Y) : max_x P(Y=x) <= cap}`` for one column of values."""

    lower: Fraction
    upper: Fraction

    def distance(self, a) -> Fraction:
        """How far ``a`` lies outside the interval (0 inside)."""
        return max(ZERO, a - self.upper, self.lower - a)

    def project(self, a) -> Fraction:
        return min(max(a, self.lower), self.upper)


def _check_cap(cap: Fraction, size: int) -> None:
    if cap * size < 1 or cap > 1:
        raise CapOutOfRange(f"cap {cap} outside [1/{size}, 1]")


def _order(values: Sequence, descending: bool) -> list:
    if descending:
        return sorted(range(len(values)), key=lambda i: (-values[i], i))
    return sorted(range(len(values)), key=lambda i: (values[i], i))


def waterfill(values: Sequence, cap, descending: bool = True) -> list:
    """Pour unit mass onto the largest (or smallest) values, at most ``cap`` each.

    Ties go to the lowest index.
    """
    cap = frac(cap)
    _check_cap(cap, len(values))
    probs = [ZERO] * len(values)
    left = ONE
    for i in _order(values, descending):
        put = min(cap, left)
        probs[i] = put
        left -= put
        if not left:
            break
    return probs


def achievable_interval(values: Sequence, cap) -> AchievableInterval:
    values = [frac(v) for v in values]
    hi = waterfill(values, cap, True)
    lo = waterfill(values, cap, False)
    return AchievableInterval(column_expect(values, lo), column_expect(values, hi))


def witness_column(values: Sequence, cap, target) -> list:
    """A distribution under ``cap`` whose expectation is ``target`` projected
    onto the achievable interval.  Mixing the two waterfill extremes keeps the
    cap because both respect it."""
    values = [frac(v) for v in values]
    hi = waterfill(values, cap, True)
    lo = waterfill(values, cap, False)
    up, down = column_expect(values, hi), column_expect(values, lo)
    target = frac(target)
    if target >= up:
        return hi
    if target <= down:
        return lo
    lam = (target - down) / (up - down)
    return [lam * a + (1 - lam) * b for a, b in zip(hi, lo)]


def _extreme_curve(values: Sequence, descending: bool) -> PiecewiseLinear:
    vals = sorted((frac(v) for v in values), reverse=descending)
    size = len(vals)
    prefix = [ZERO]
    for v in vals:
        prefix.append(prefix[-1] + v)
    # at cap 1/j exactly j points are full
    return PiecewiseLinear(tuple((Fraction(1, j), prefix[j] / j) for j in range(size, 0, -1)))


def upper_curve(values: Sequence) -> PiecewiseLinear:
    """Upper endpoint of the achievable interval as a function of the cap (concave)."""
    return _extreme_curve(values, True)


def lower_curve(values: Sequence) -> PiecewiseLinear:
    """Lower endpoint as a function of the cap (convex)."""
    return _extreme_curve(values, False)


def penalty_curve(values: Sequence, target) -> PiecewiseLinear:
    """``m -> distance(target, interval(m))``: convex and nonincreasing."""
    target = frac(target)
    up = upper_curve(values)
    lo = lower_curve(values)
    zero = constant(ZERO, up.lo, up.hi)
    return pl_max([zero, up.affine(-1, target), lo.affine(1, -target)])


# ---------------------------------------------------------------------------
# verdict containers


@dataclass
class BudgetAssignment:
    """Per-z caps ``m_z`` (``None`` on zero-mass z) and optional tolerances."""

    caps: list
    tolerances: list | None = None

    def spent(self, z_marginal) -> Fraction:
        return sum((p * c for p, c in zip(z_marginal, self.caps) if c is not None), ZERO)

    def expected_tolerance(self, z_marginal) -> Fraction:
        return sum((p * e for p, e in zip(z_marginal, self.tolerances) if e is not None), ZERO)

    def to_json(self) -> dict:
        out = {"caps": [None if c is None else str(c) for c in self.caps]}
        if self.tolerances is not None:
            out["tolerances"] = [None if e is None else str(e) for e in self.tolerances]
        return out


@dataclass
class EntropyVerdict:
    """Outcome of one entropy check.

    ``value`` is the quantity compared against epsilon (the worst member's
    distance, the LP optimum, ...).  On failure of a metric/modulus check
    ``witness`` is the violating class member; on success it is a witness
    distribution or budget assignment where one is available.
    """

    notion: str
    params: EntropyParams
    holds: bool
    witness: object = None
    value: Fraction | None = None
    worst_index: int | None = None
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# helpers


def _columns(d: Distinguisher, j: Joint):
    """Per supported z: ``(z, P(z), D(., z), E D(X|z, z))``."""
    if (d.n, d.m) != (j.n, j.m):
        raise DomainMismatch(f"distinguisher on ({d.n},{d.m}) bits, joint on ({j.n},{j.m})")
    zm = j.z_marginal()
    out = []
    for z in range(j.nz):
        if not zm[z]:
            continue
        col = d.column(z)
        out.append((z, zm[z], col, column_expect(col, j.column(z)) / zm[z]))
    return out


def _joint_from_columns(j: Joint, cols: dict) -> Joint:
    """Joint with Z-marginal of ``j`` and ``Y | Z=z`` given per supported z."""
    conds = [Dist(j.x_domain, tuple(cols[z])) if z in cols else None for z in range(j.nz)]
    return j.with_x_conditionals(conds)


def _require_boolean(cls: Sequence[Distinguisher]) -> None:
    for i, d in enumerate(cls):
        if not d.is_boolean:
            raise NonBooleanClass(
                f"class member {i} is not boolean; threshold it before asking for modulus entropy"
            )


def _check_gamma(gamma: Fraction, j: Joint) -> None:
    if gamma * j.nx < 1:
        raise CapOutOfRange(f"gamma {gamma} is below 2^-{j.n}; no distribution qualifies")


# ---------------------------------------------------------------------------
# per-distinguisher optimizations


@dataclass
class MetricRange:
    """Reachable ``E D(Y, Z)`` over the feasible Y, with the optimizing caps."""

    lower: Fraction
    upper: Fraction
    target: Fraction
    caps_low: dict
    caps_up: dict

    @property
    def distance(self) -> Fraction:
        return max(ZERO, self.target - self.upper, self.lower - self.target)


def metric_range(d: Distinguisher, j: Joint, gamma, variant: str = "avg") -> MetricRange:
    """Interval of ``E D(Y, Z)`` over ``Y`` with the Z-marginal of ``j`` and
    guessing probability at most ``gamma`` (on average or for every z)."""
    gamma = frac(gamma)
    _check_gamma(gamma, j)
    cols = _columns(d, j)
    target = expect(d, j)
    if variant == "worst":
        lo = up = ZERO
        for _, p, col, _ in cols:
            iv = achievable_interval(col, gamma)
            lo += p * iv.lower
            up += p * iv.upper
        caps = {z: gamma for z, *_ in cols}
        return MetricRange(lo, up, target, caps, dict(caps))
    if variant != "avg":
        raise ValueError(f"unknown variant {variant!r}")
    weights = [p for _, p, _, _ in cols]
    ups = [upper_curve(col).affine(-1) for _, _, col, _ in cols]
    lows = [lower_curve(col) for _, _, col, _ in cols]
    a_up = allocate(ups, weights, gamma)
    a_lo = allocate(lows, weights, gamma)
    zs = [z for z, *_ in cols]
    return MetricRange(a_lo.value, -a_up.value, target,
                       dict(zip(zs, a_lo.caps)), dict(zip(zs, a_up.caps)))


def metric_witness(d: Distinguisher, j: Joint, rng: MetricRange) -> Joint:
    """Feasible Y whose ``E D(Y, Z)`` is the projection of ``E D(X, Z)``."""
    cols = _columns(d, j)
    up = {z: waterfill(col, rng.caps_up[z], True) for z, _, col, _ in cols}
    lo = {z: waterfill(col, rng.caps_low[z], False) for z, _, col, _ in cols}
    t = rng.target
    if t >= rng.upper:
        mix = up
    elif t <= rng.lower:
        mix = lo
    else:
        lam = (t - rng.lower) / (rng.upper - rng.lower)
        mix = {z: [lam * a + (1 - lam) * b for a, b in zip(up[z], lo[z])] for z in up}
    return _joint_from_columns(j, mix)


@dataclass
class ModulusFit:
    """Minimum of ``sum_z P(z) dist(a(z), I(z, m_z))`` and its caps."""

    value: Fraction
    caps: dict
    penalties: dict


def modulus_fit(d: Distinguisher, j: Joint, gamma, variant: str = "avg") -> ModulusFit:
    gamma = frac(gamma)
    _check_gamma(gamma, j)
    cols = _columns(d, j)
    weights = [p for _, p, _, _ in cols]
    zs = [z for z, *_ in cols]
    if variant == "worst":
        # fixed caps: no curves needed, which keeps wide X domains cheap
        pens = {z: achievable_interval(col, gamma).distance(a) for z, _, col, a in cols}
        value = sum((w * pens[z] for w, z in zip(weights, zs)), ZERO)
        return ModulusFit(value, {z: gamma for z in zs}, pens)
    if variant != "avg":
        raise ValueError(f"unknown variant {variant!r}")
    curves = [penalty_curve(col, a) for _, _, col, a in cols]
    alloc = allocate(curves, weights, gamma)
    pens = {z: c(m) for z, c, m in zip(zs, curves, alloc.caps)}
    return ModulusFit(alloc.value, dict(zip(zs, alloc.caps)), pens)


def modulus_witness(d: Distinguisher, j: Joint, fit: ModulusFit) -> Joint:
    cols = _columns(d, j)
    return _joint_from_columns(
        j, {z: witness_column(col, fit.caps[z], a) for z, _, col, a in cols}
    )


# ---------------------------------------------------------------------------
# class-level verdicts


def min_entropy(j: Joint, params: EntropyParams) -> EntropyVerdict:
    g = cond_guess_prob_avg(j)
    return EntropyVerdict("min", params, g <= params.gamma, value=g)


def _metric_verdict(notion, j, cls, params, variant, with_witness):
    worst, worst_i, worst_rng = None, None, None
    for i, d in enumerate(cls):
        rng = metric_range(d, j, params.gamma, variant)
        if worst is None or rng.distance > worst:
            worst, worst_i, worst_rng = rng.distance, i, rng
    if worst is None:
        return EntropyVerdict(notion, params, True, value=ZERO)
    holds = worst <= params.epsilon
    witness = None
    if not holds:
        witness = cls[worst_i]
    elif with_witness:
        witness = metric_witness(cls[worst_i], j, worst_rng)
    return EntropyVerdict(
        notion, params, holds, witness, worst, worst_i,
        {"lower": worst_rng.lower, "upper": worst_rng.upper, "target": worst_rng.target},
    )


def metric_uncond(x: Dist, cls: Sequence[Distinguisher], params: EntropyParams,
                  with_witness: bool = False) -> EntropyVerdict:
    """Metric entropy of a single distribution (distinguishers with ``m = 0``)."""
    return _metric_verdict("metric-uncond", Joint.from_dist(x), cls, params, "worst", with_witness)


def metric_cond_worst(j: Joint, cls, params: EntropyParams, with_witness=False) -> EntropyVerdict:
    return _metric_verdict("metric-worst", j, cls, params, "worst", with_witness)


def metric_cond_avg(j: Joint, cls, params: EntropyParams, with_witness=False) -> EntropyVerdict:
    return _metric_verdict("metric-avg", j, cls, params, "avg", with_witness)


def modulus_cond(j: Joint, cls, params: EntropyParams, variant: str = "avg",
                 with_witness: bool = False) -> EntropyVerdict:
    """Modulus entropy: for every D some feasible Y keeps ``E_z |eps_D(z)| <= eps``."""
    _require_boolean(cls)
    notion = f"modulus-{variant}"
    worst, worst_i, worst_fit = None, None, None
    for i, d in enumerate(cls):
        fit = modulus_fit(d, j, params.gamma, variant)
        if worst is None or fit.value > worst:
            worst, worst_i, worst_fit = fit.value, i, fit
    if worst is None:
        return EntropyVerdict(notion, params, True, value=ZERO)
    holds = worst <= params.epsilon
    if not holds:
        witness = cls[worst_i]
    elif with_witness:
        witness = modulus_witness(cls[worst_i], j, worst_fit)
    else:
        witness = None
    return EntropyVerdict(notion, params, holds, witness, worst, worst_i,
                          {"caps": worst_fit.caps})


def hill_lp(j: Joint, cls: Sequence[Distinguisher], gamma):
    """Smallest ``t`` such that one feasible Y has advantage ``<= t`` against
    every member.  Returns ``(t, Y)``."""
    gamma = frac(gamma)
    _check_gamma(gamma, j)
    zm = j.z_marginal()
    support = j.support_z()
    model = Model()
    q = {(x, z): model.var() for z in support for x in range(j.nx)}
    w = {z: model.var() for z in support}
    t = model.var()
    for z in support:
        model.add({q[x, z]: 1 for x in range(j.nx)}, "=", zm[z])
        for x in range(j.nx):
            model.add({q[x, z]: 1, w[z]: -1}, "<=", 0)
    model.add({w[z]: 1 for z in support}, "<=", gamma)
    for d in cls:
        if (d.n, d.m) != (j.n, j.m):
            raise DomainMismatch("class member on a different domain")
        target = expect(d, j)
        coeffs = {q[x, z]: d.values[x][z] for z in support for x in range(j.nx) if d.values[x][z]}
        # target - sum q D <= t  and  sum q D - target <= t
        lo = dict(coeffs)
        lo[t] = 1
        model.add(lo, ">=", target)
        hi = {k: -v for k, v in coeffs.items()}
        hi[t] = 1
        model.add(hi, ">=", -target)
    res = model.minimize({t: 1})
    if not res.ok:
        raise RuntimeError(f"HILL LP unexpectedly {res.status}")
    cols = {z: [res.x[q[x, z]] / zm[z] for x in range(j.nx)] for z in support}
    return res.x[t], _joint_from_columns(j, cols)


def hill_cond_avg(j: Joint, cls, params: EntropyParams) -> EntropyVerdict:
    """HILL entropy by exact LP; the witness is the optimal Y."""
    t, y = hill_lp(j, cls, params.gamma)
    holds = t <= params.epsilon
    return EntropyVerdict("hill-avg", params, holds, y, t)


def decomposable_curves(j: Joint, cls: Sequence[Distinguisher]) -> dict:
    """Per supported z, ``m -> max_D dist(E D(X|z), I_D(z, m))``."""
    zm = j.z_marginal()
    out = {}
    for z in j.support_z():
        xcol = j.column(z)
        curves = []
        for d in cls:
            col = d.column(z)
            curves.append(penalty_curve(col, column_expect(col, xcol) / zm[z]))
        out[z] = pl_max(curves) if curves else constant(ZERO, Fraction(1, j.nx), 1)
    return out


def decomposable_check(j: Joint, cls, params: EntropyParams) -> EntropyVerdict:
    """Best split of ``(gamma, eps)`` into per-z budgets with ``E m_z = gamma``."""
    gamma = params.gamma
    _check_gamma(gamma, j)
    for d in cls:
        if (d.n, d.m) != (j.n, j.m):
            raise DomainMismatch("class member on a different domain")
    zm = j.z_marginal()
    curves = decomposable_curves(j, cls)
    zs = sorted(curves)
    weights = [zm[z] for z in zs]
    alloc = allocate([curves[z] for z in zs], weights, gamma)
    # the curves are nonincreasing, so spending the rest of the budget is free
    caps = top_up(alloc.caps, weights, [ONE] * len(zs), gamma)
    tols = [curves[z](m) for z, m in zip(zs, caps)]
    full_caps = [None] * j.nz
    full_tols = [None] * j.nz
    for z, m, e in zip(zs, caps, tols):
        full_caps[z] = m
        full_tols[z] = e
    assignment = BudgetAssignment(full_caps, full_tols)
    value = assignment.expected_tolerance(zm)
    return EntropyVerdict("decomposable", params, value <= params.epsilon, assignment, value)


def squared_advantage(jp: Joint, jq: Joint, cls: Sequence[Distinguisher]):
    """``max_D sum_z P(z) eps_D(z)^2``; returns ``(value, argmax index)``."""
    best, best_i = ZERO, None
    for i, d in enumerate(cls):
        s = advantage_profile(d, jp, jq).squared
        if best_i is None or s > best:
            best, best_i = s, i
    return best, best_i


def evaluate(notion: str, j: Joint, cls, params: EntropyParams, with_witness=False) -> EntropyVerdict:
    """Dispatch on a notion name."""
    if notion == "min":
        return min_entropy(j, params)
    if notion == "metric-uncond":
        if j.m != 0:
            raise DomainMismatch("metric-uncond needs a joint without Z bits")
        return metric_uncond(j.x_marginal(), cls, params, with_witness)
    if notion == "metric-worst":
        return metric_cond_worst(j, cls, params, with_witness)
    if notion == "metric-avg":
        return metric_cond_avg(j, cls, params, with_witness)
    if notion in ("modulus-avg", "modulus-worst"):
        return modulus_cond(j, cls, params, notion.split("-")[1], with_witness)
    if notion == "hill-avg":
        return hill_cond_avg(j, cls, params)
    if notion == "decomposable":
        return decomposable_check(j, cls, params)
    raise ValueError(f"unknown notion {notion!r}")
