"""Direct LP formulations of the average-case optimizations.

These ignore all structure (no waterfilling, no curves) and serve as an
independent reference for the greedy allocators in :mod:`entlab.engine`.
Variables: ``q(x, z)`` is the mass of Y at ``(x, z)`` and ``w_z = P(z) m_z``
the cap mass at ``z``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .dist import ZERO, Joint, frac
from .distinguisher import Distinguisher
from .lp import Model


def _feasible_y(model: Model, j: Joint, w: dict, support: list) -> dict:
    zm = j.z_marginal()
    q = {(x, z): model.var() for z in support for x in range(j.nx)}
    for z in support:
        model.add({q[x, z]: 1 for x in range(j.nx)}, "=", zm[z])
        for x in range(j.nx):
            model.add({q[x, z]: 1, w[z]: -1}, "<=", 0)
    return q


def _caps(model: Model, j: Joint, support: list, gamma, variant: str, equality=False) -> dict:
    zm = j.z_marginal()
    w = {z: model.var() for z in support}
    if variant == "worst":
        for z in support:
            model.add({w[z]: 1}, "=", gamma * zm[z])
    else:
        model.add({w[z]: 1 for z in support}, "=" if equality else "<=", gamma)
        for z in support:
            model.add({w[z]: 1}, "<=", zm[z])
    return w


def metric_range_lp(d: Distinguisher, j: Joint, gamma, variant="avg") -> tuple:
    """``(min, max)`` of ``E D(Y, Z)`` over feasible Y."""
    gamma = frac(gamma)
    support = j.support_z()
    out = []
    for sense in ("min", "max"):
        model = Model()
        w = _caps(model, j, support, gamma, variant)
        q = _feasible_y(model, j, w, support)
        obj = {q[x, z]: d.values[x][z] for (x, z) in q if d.values[x][z]}
        res = model.minimize(obj) if sense == "min" else model.maximize(obj)
        out.append(res.value if res.value is not None else ZERO)
    return tuple(out)


def modulus_value_lp(d: Distinguisher, j: Joint, gamma, variant="avg") -> Fraction:
    """``min_Y sum_z |sum_x (P - q)(x, z) D(x, z)|``."""
    gamma = frac(gamma)
    support = j.support_z()
    model = Model()
    w = _caps(model, j, support, gamma, variant)
    q = _feasible_y(model, j, w, support)
    s = {z: model.var() for z in support}
    for z in support:
        target = sum((j.probs[x][z] * d.values[x][z] for x in range(j.nx)), ZERO)
        coeffs = {q[x, z]: d.values[x][z] for x in range(j.nx) if d.values[x][z]}
        lo = {k: v for k, v in coeffs.items()}
        lo[s[z]] = 1
        model.add(lo, ">=", target)
        hi = {k: -v for k, v in coeffs.items()}
        hi[s[z]] = 1
        model.add(hi, ">=", -target)
    return model.minimize({s[z]: 1 for z in support}).value


def decomposable_value_lp(j: Joint, cls: Sequence[Distinguisher], gamma) -> Fraction:
    """``min sum_z P(z) eps(z)`` over per-z budgets with ``E m_z = gamma``;
    each member gets its own Y but all share the caps."""
    gamma = frac(gamma)
    support = j.support_z()
    model = Model()
    w = _caps(model, j, support, gamma, "avg", equality=True)
    e = {z: model.var() for z in support}
    for d in cls:
        q = _feasible_y(model, j, w, support)
        for z in support:
            target = sum((j.probs[x][z] * d.values[x][z] for x in range(j.nx)), ZERO)
            coeffs = {q[x, z]: d.values[x][z] for x in range(j.nx) if d.values[x][z]}
            lo = dict(coeffs)
            lo[e[z]] = 1
            model.add(lo, ">=", target)
            hi = {k: -v for k, v in coeffs.items()}
            hi[e[z]] = 1
            model.add(hi, ">=", -target)
    return model.minimize({e[z]: 1 for z in support}).value
