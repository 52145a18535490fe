"""Exact piecewise-linear curves and greedy budget allocation.

Every average-case optimization in the engine has the shape

    minimize  sum_z w_z * c_z(m_z)   subject to   sum_z w_z * m_z <= budget

with each ``c_z`` convex and piecewise linear on ``[lo_z, hi_z]``.  Buying
segments in order of steepest descent (a fractional knapsack over
segments) is optimal for that problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dist import ZERO, frac
from .errors import CapOutOfRange


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous PL function given by breakpoints ``(t, value)``."""

    points: tuple

    def __post_init__(self):
        pts = tuple((frac(t), frac(v)) for t, v in self.points)
        if not pts:
            raise ValueError("empty curve")
        for (a, _), (b, _) in zip(pts, pts[1:]):
            if not a < b:
                raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def lo(self) -> Fraction:
        return self.points[0][0]

    @property
    def hi(self) -> Fraction:
        return self.points[-1][0]

    def __call__(self, t) -> Fraction:
        t = frac(t)
        pts = self.points
        if t < pts[0][0] or t > pts[-1][0]:
            raise ValueError(f"{t} outside [{pts[0][0]}, {pts[-1][0]}]")
        lo, hi = 0, len(pts) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if pts[mid][0] <= t:
                lo = mid
            else:
                hi = mid
        (a, fa) = pts[lo]
        if t == a or lo == len(pts) - 1:
            return fa
        (b, fb) = pts[hi]
        return fa + (fb - fa) * (t - a) / (b - a)

    def segments(self):
        """``(start, end, slope)`` triples."""
        return [
            (a, b, (fb - fa) / (b - a))
            for (a, fa), (b, fb) in zip(self.points, self.points[1:])
        ]

    def affine(self, scale=1, shift=0) -> "PiecewiseLinear":
        scale, shift = frac(scale), frac(shift)
        return PiecewiseLinear(tuple((t, scale * v + shift) for t, v in self.points))

    def simplify(self) -> "PiecewiseLinear":
        """Drop breakpoints where the slope does not change."""
        pts = list(self.points)
        out = [pts[0]]
        for i in range(1, len(pts) - 1):
            (a, fa), (b, fb), (c, fc) = out[-1], pts[i], pts[i + 1]
            if (fb - fa) * (c - b) != (fc - fb) * (b - a):
                out.append(pts[i])
        if len(pts) > 1:
            out.append(pts[-1])
        return PiecewiseLinear(tuple(out))

    def is_convex(self) -> bool:
        slopes = [s for _, _, s in self.segments()]
        return all(a <= b for a, b in zip(slopes, slopes[1:]))

    def is_concave(self) -> bool:
        slopes = [s for _, _, s in self.segments()]
        return all(a >= b for a, b in zip(slopes, slopes[1:]))


def constant(value, lo, hi) -> PiecewiseLinear:
    lo, hi = frac(lo), frac(hi)
    if lo == hi:
        return PiecewiseLinear(((lo, frac(value)),))
    return PiecewiseLinear(((lo, frac(value)), (hi, frac(value))))


def pl_max(curves: Sequence[PiecewiseLinear]) -> PiecewiseLinear:
    """Pointwise maximum (upper envelope) of curves on a common domain."""
    lo, hi = curves[0].lo, curves[0].hi
    if any(c.lo != lo or c.hi != hi for c in curves):
        raise ValueError("curves must share a domain")
    if lo == hi:
        return PiecewiseLinear(((lo, max(c(lo) for c in curves)),))
    grid = sorted({t for c in curves for t, _ in c.points})
    out = []
    for u, w in zip(grid, grid[1:]):
        lines = [(c(u), c(w)) for c in curves]
        pts = _envelope(u, w, lines)
        if out:
            pts = pts[1:]
        out.extend(pts)
    return PiecewiseLinear(tuple(out)).simplify()


def _envelope(u, w, lines):
    """Upper envelope on ``[u, w]`` of lines given by their end values."""
    span = w - u
    fu = max(a for a, _ in lines)
    fw = max(b for _, b in lines)
    # line active at u with the steepest rise, line active at w with the gentlest
    ia = max((i for i, (a, _) in enumerate(lines) if a == fu), key=lambda i: lines[i][1] - lines[i][0])
    if lines[ia][1] == fw:
        return [(u, fu), (w, fw)]
    ib = min((i for i, (_, b) in enumerate(lines) if b == fw), key=lambda i: lines[i][1] - lines[i][0])
    a0, a1 = lines[ia]
    b0, b1 = lines[ib]
    # a0 - b0 > 0 and a1 - b1 < 0 so the crossing is interior
    lam = (a0 - b0) / ((a0 - b0) - (a1 - b1))
    t = u + lam * span
    mid = [(a + (b - a) * lam) for a, b in lines]
    left = _envelope(u, t, [(a, v) for (a, _), v in zip(lines, mid)])
    right = _envelope(t, w, [(v, b) for (_, b), v in zip(lines, mid)])
    return left + right[1:]


@dataclass
class Allocation:
    caps: list
    value: Fraction
    spent: Fraction
    leftover: Fraction


def allocate(curves: Sequence[PiecewiseLinear], weights: Sequence, budget) -> Allocation:
    """Minimize ``sum w_i c_i(m_i)`` s.t. ``sum w_i m_i <= budget``.

    Curves must be convex.  Ties between equally steep segments go to the
    lower curve index, then to the earlier segment.
    """
    budget = frac(budget)
    weights = [frac(w) for w in weights]
    caps = [c.lo for c in curves]
    spent = sum((w * m for w, m in zip(weights, caps)), ZERO)
    if spent > budget:
        raise CapOutOfRange(f"minimum caps need budget {spent} > {budget}")
    remaining = budget - spent
    segs = []
    for i, (c, w) in enumerate(zip(curves, weights)):
        if not w:
            continue
        prev = None
        for k, (a, b, s) in enumerate(c.segments()):
            if prev is not None and s < prev:
                raise ValueError(f"curve {i} is not convex")
            prev = s
            if s < 0:
                segs.append((s, i, k, a, b))
    segs.sort(key=lambda t: (t[0], t[1], t[2]))
    for s, i, k, a, b in segs:
        if remaining <= 0:
            break
        w = weights[i]
        cost = w * (b - a)
        if cost <= remaining:
            caps[i] = b
            remaining -= cost
        else:
            caps[i] = a + remaining / w
            remaining = ZERO
    value = sum((w * c(m) for c, w, m in zip(curves, weights, caps) if w), ZERO)
    return Allocation(caps, value, budget - remaining, remaining)


def top_up(caps: Sequence, weights: Sequence, his: Sequence, target) -> list:
    """Raise caps (lowest index first, up to ``his``) until ``sum w m = target``."""
    caps = [frac(c) for c in caps]
    target = frac(target)
    spent = sum((frac(w) * c for w, c in zip(weights, caps)), ZERO)
    for i, (w, h) in enumerate(zip(weights, his)):
        if spent >= target:
            break
        w = frac(w)
        if not w:
            continue
        room = (frac(h) - caps[i]) * w
        add = min(room, target - spent)
        caps[i] += add / w
        spent += add
    return caps
