from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from entlab.errors import CapOutOfRange
from entlab.lp import Model
from entlab.piecewise import PiecewiseLinear, allocate, constant, pl_max, top_up


@st.composite
def convex_curves(draw):
    k = draw(st.integers(1, 4))
    xs = [F(1, j) for j in range(k + 1, 0, -1)]  # 1/(k+1) < ... < 1
    slopes = sorted(F(draw(st.integers(-8, 2)), 2) for _ in range(k))
    v = F(draw(st.integers(0, 8)), 4)
    pts = [(xs[0], v)]
    for (a, b), s in zip(zip(xs, xs[1:]), slopes):
        v += s * (b - a)
        pts.append((b, v))
    return PiecewiseLinear(tuple(pts))


def lp_allocate(curves, weights, budget):
    m = Model()
    caps = [m.var() for _ in curves]
    cost = [m.var() for _ in curves]
    shift = min(min(v for _, v in c.points) for c in curves)
    for c, x, s in zip(curves, caps, cost):
        m.add({x: 1}, ">=", c.lo)
        m.add({x: 1}, "<=", c.hi)
        for a, b, slope in c.segments():
            # s >= c(a) + slope (x - a) - shift, all on the nonnegative orthant
            m.add({s: 1, x: -slope}, ">=", c(a) - slope * a - shift)
        if not c.segments():
            m.add({s: 1}, ">=", c.points[0][1] - shift)
    m.add({x: w for x, w in zip(caps, weights)}, "<=", budget)
    res = m.minimize({s: w for s, w in zip(cost, weights)})
    return res.value + shift * sum(weights)


def test_evaluate_and_segments():
    c = PiecewiseLinear(((0, 0), (1, 2), (3, 2)))
    assert c(F(1, 2)) == 1 and c(2) == 2
    assert c.segments() == [(0, 1, 2), (1, 3, 0)]
    assert c.is_concave() and not c.is_convex()
    with pytest.raises(ValueError):
        c(4)


def test_simplify():
    c = PiecewiseLinear(((0, 0), (1, 1), (2, 2)))
    assert c.simplify().points == ((0, 0), (2, 2))


def test_pl_max_of_lines():
    a = PiecewiseLinear(((0, 0), (2, 2)))
    b = PiecewiseLinear(((0, 2), (2, 0)))
    m = pl_max([a, b])
    assert m(0) == 2 and m(1) == 1 and m(2) == 2 and m.is_convex()


def test_allocate_rejects_small_budget():
    c = constant(0, F(1, 2), 1)
    with pytest.raises(CapOutOfRange):
        allocate([c], [1], F(1, 4))


def test_top_up_fills_in_index_order():
    assert top_up([0, 0], [F(1, 2), F(1, 2)], [1, 1], F(3, 4)) == [1, F(1, 2)]


@given(st.lists(convex_curves(), min_size=1, max_size=4), st.data())
def test_allocate_matches_lp(curves, data):
    ws = [F(data.draw(st.integers(1, 4)), 1) for _ in curves]
    total = sum(ws)
    ws = [w / total for w in ws]
    floor = sum(w * c.lo for w, c in zip(ws, curves))
    budget = floor + (1 - floor) * F(data.draw(st.integers(0, 8)), 8)
    a = allocate(curves, ws, budget)
    assert a.value == lp_allocate(curves, ws, budget)
    assert a.spent <= budget
    assert all(c.lo <= m <= c.hi for c, m in zip(curves, a.caps))
