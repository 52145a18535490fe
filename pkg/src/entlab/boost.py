"""Metric-to-HILL conversion by solving the distinguishing game.

The game: the distinguisher side picks ``D`` from a complement-closed class,
the other side picks a feasible ``Y`` (average guessing probability at most
gamma, same Z-marginal as X), payoff ``E D(X, Z) - E D(Y, Z)``.  Its value
is obtained exactly from the HILL LP.  When it exceeds ``eps + delta`` a
multiplicative-weights run (Hedge on the class against exact best responses)
yields a convex combination of class members whose advantage against every
feasible Y is at least ``eps``; that bound is then re-certified exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dist import EntropyParams, Joint, frac
from .distinguisher import Distinguisher, convex_combine, is_complement_closed
from .engine import hill_lp, metric_range
from .errors import NonClosedClass


@dataclass(frozen=True)
class BoostConfig:
    """``C`` scales the round count ``ceil(C ln|Omega| / delta^2)``."""

    C: float = 16.0
    max_denominator: int = 1 << 20
    prune: bool = True


@dataclass
class BoostResult:
    outcome: str  # "witness" | "combo"
    game_value: Fraction
    rounds_bound: int
    witness: Joint | None = None
    combo: Distinguisher | None = None
    weights: list = field(default_factory=list)
    combo_advantage: Fraction | None = None
    rounds: int = 0

    @property
    def length(self) -> int:
        return sum(1 for w in self.weights if w)


def rounds_bound(omega: int, delta, C: float = 16.0) -> int:
    """``ceil(C ln|Omega| / delta^2)``."""
    delta = frac(delta)
    return math.ceil(C * math.log(omega) / float(delta * delta))


def _best_response(cols, zm, gamma, nx):
    """Float waterfill maximizing ``E Dbar(Y, Z)`` under average cap gamma.

    ``cols[z]`` holds the Dbar values of column z.  Mirrors the exact
    allocator in :mod:`entlab.engine`.
    """
    support = [z for z in range(len(zm)) if zm[z] > 0]
    orders = {z: np.argsort(-cols[z], kind="stable") for z in support}
    # segment j of column z: cap from 1/(j+1) to 1/j, slope S_j - j v_{j+1}
    segs = []
    for z in support:
        v = cols[z][orders[z]]
        s = np.cumsum(v)
        for jj in range(1, nx):
            slope = s[jj - 1] - jj * v[jj]
            if slope > 0:
                segs.append((-slope, z, -jj, jj))
    segs.sort()
    caps = {z: 1.0 / nx for z in support}
    budget = gamma - sum(zm[z] / nx for z in support)
    for _, z, _, jj in segs:
        if budget <= 0:
            break
        lo, hi = 1.0 / (jj + 1), 1.0 / jj
        cost = zm[z] * (hi - lo)
        if cost <= budget:
            caps[z] = hi
            budget -= cost
        else:
            caps[z] = lo + budget / zm[z]
            budget = 0.0
    y = np.zeros((nx, len(zm)))
    for z in support:
        left = 1.0
        for x in orders[z]:
            put = min(caps[z], left)
            y[x, z] = zm[z] * put
            left -= put
            if left <= 0:
                break
    return y


def _rationalize(weights, max_den):
    fr = [Fraction(float(w)).limit_denominator(max_den) for w in weights]
    total = sum(fr)
    return [w / total for w in fr]


def metric_to_hill_boost(j: Joint, cls, params: EntropyParams, delta,
                         config: BoostConfig = BoostConfig(), force_mw: bool = False) -> BoostResult:
    """Either a single Y fooling every member to within ``eps + delta`` or a
    convex combination with certified advantage at least ``eps``.

    ``force_mw`` runs the weights loop even when the witness exists, which
    is useful for checking that no combination beats the game value.
    """
    cls = list(cls)
    if not is_complement_closed(cls):
        raise NonClosedClass("the class must contain 1 - D for every member D")
    gamma_q, eps, delta = params.gamma, params.epsilon, frac(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    omega = j.nx * j.nz
    bound = rounds_bound(omega, delta, config.C)
    value, y_lp = hill_lp(j, cls, gamma_q)
    result = BoostResult("witness", value, bound)
    if value <= eps + delta:
        result.witness = y_lp
        if not force_mw:
            return result
    gamma = float(gamma_q)
    K = len(cls)
    mats = np.array([[float(v) for v in d.flat()] for d in cls])  # K x |Omega|
    px = np.array([float(p) for row in j.probs for p in row])
    target = mats @ px
    zm = [float(p) for p in j.z_marginal()]
    eta = math.sqrt(2.0 * math.log(max(K, 2)) / bound)
    logw = np.zeros(K)
    avg = np.zeros(K)
    for _ in range(bound):
        p = np.exp(logw - logw.max())
        p /= p.sum()
        avg += p
        dbar = (p @ mats).reshape(j.nx, j.nz)
        y = _best_response([dbar[:, z] for z in range(j.nz)], zm, gamma, j.nx)
        payoff = target - mats @ y.reshape(-1)
        logw += eta * payoff
    avg /= bound
    if config.prune:
        # members this light cannot move the advantage by more than delta/8 in total
        avg = np.where(avg < float(delta) / (8 * K), 0.0, avg)
    weights = _rationalize(avg, config.max_denominator)
    combo = convex_combine([(w, d) for w, d in zip(weights, cls) if w])
    rng = metric_range(combo, j, gamma_q, "avg")
    if value > eps + delta:
        result.outcome = "combo"
    result.combo = combo
    result.weights = weights
    result.combo_advantage = rng.target - rng.upper
    result.rounds = bound
    return result
