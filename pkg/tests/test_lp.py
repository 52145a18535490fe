import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from entlab.errors import LPBudgetExceeded
from entlab.lp import Model, solve

linprog = pytest.importorskip("scipy.optimize").linprog

STATUS = {0: "optimal", 2: "infeasible", 3: "unbounded"}


def scipy_solve(nvars, objective, constraints):
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for coeffs, rel, rhs in constraints:
        row = [coeffs.get(j, 0) for j in range(nvars)]
        if rel == "<=":
            a_ub.append(row); b_ub.append(rhs)
        elif rel == ">=":
            a_ub.append([-v for v in row]); b_ub.append(-rhs)
        else:
            a_eq.append(row); b_eq.append(rhs)
    res = linprog([objective.get(j, 0) for j in range(nvars)],
                  A_ub=a_ub or None, b_ub=b_ub or None, A_eq=a_eq or None, b_eq=b_eq or None,
                  bounds=[(0, None)] * nvars, method="highs")
    return STATUS[res.status], res.fun


def random_lp(rng):
    nv, nc = rng.randint(1, 6), rng.randint(1, 6)
    cons = [({j: rng.randint(-3, 3) for j in range(nv)}, rng.choice(["<=", ">=", "="]),
             rng.randint(-4, 6)) for _ in range(nc)]
    return nv, {j: rng.randint(-3, 3) for j in range(nv)}, cons


def test_against_scipy():
    rng = random.Random(7)
    for _ in range(300):
        nv, obj, cons = random_lp(rng)
        r = solve(nv, obj, cons)
        status, value = scipy_solve(nv, obj, cons)
        assert r.status == status
        if status == "optimal":
            assert abs(float(r.value) - value) < 1e-7


@given(st.integers(0, 10 ** 6))
def test_optimal_points_are_feasible(seed):
    nv, obj, cons = random_lp(random.Random(seed))
    r = solve(nv, obj, cons)
    if not r.ok:
        return
    assert all(v >= 0 for v in r.x)
    for coeffs, rel, rhs in cons:
        lhs = sum(F(c) * r.x[j] for j, c in coeffs.items())
        assert {"<=": lhs <= rhs, ">=": lhs >= rhs, "=": lhs == rhs}[rel]
    assert r.value == sum(F(c) * r.x[j] for j, c in obj.items())


def test_exact_rational_optimum():
    # max x + y with 3x + y <= 2, x + 3y <= 2 -> x = y = 1/2
    m = Model()
    x, y = m.var("x"), m.var("y")
    m.add({x: 3, y: 1}, "<=", 2)
    m.add({x: 1, y: 3}, "<=", 2)
    r = m.maximize({x: 1, y: 1})
    assert r.ok and r.value == 1 and r.x == [F(1, 2), F(1, 2)]


def test_fractional_data():
    r = solve(1, {0: 1}, [({0: F(3, 7)}, ">=", F(1, 3))])
    assert r.value == F(7, 9)


def test_infeasible_and_unbounded():
    assert solve(1, {0: 1}, [({0: 1}, "<=", -1)]).status == "infeasible"
    assert solve(1, {0: 1}, [({0: 1}, ">=", 1)], maximize=True).status == "unbounded"


def test_degenerate_cycle_guard():
    # a classic degenerate instance; Bland's rule must terminate
    cons = [({0: F(1, 4), 1: -8, 2: -1, 3: 9}, "<=", 0),
            ({0: F(1, 2), 1: -12, 2: F(-1, 2), 3: 3}, "<=", 0),
            ({2: 1}, "<=", 1)]
    r = solve(4, {0: F(-3, 4), 1: 20, 2: F(-1, 2), 3: 6}, cons)
    assert r.ok and r.value == F(-5, 4)


def test_size_guard():
    with pytest.raises(LPBudgetExceeded):
        solve(10 ** 6, {}, [])
