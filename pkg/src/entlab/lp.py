"""Dense two-phase simplex over exact rationals with Bland's rule.

Only meant for desk-scale problems (a few hundred rows).  All variables are
nonnegative; constraints are ``(coeffs, relation, rhs)`` with ``coeffs`` a
``{column: value}`` dict and ``relation`` one of ``"<=", "=", ">="``.
The tableau is kept in ``gmpy2.mpq`` for speed; inputs and outputs are
Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

from .dist import frac
from .errors import LPBudgetExceeded

MAX_VARS = 2000
MAX_ROWS = 4000

ZERO = mpq(0)
ONE = mpq(1)


def _q(v) -> mpq:
    v = frac(v)
    return mpq(v.numerator, v.denominator)


def _f(v: mpq) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list | None = None
    value: Fraction | None = None
    pivots: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.rows = rows  # list[list[mpq]]
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def pivot(self, r, c, obj):
        prow = self.rows[r]
        pv = prow[c]
        if pv != 1:
            inv = 1 / pv
            for j in range(self.ncols):
                if prow[j]:
                    prow[j] *= inv
            self.rhs[r] *= inv
        nz = [j for j in range(self.ncols) if prow[j]]
        prhs = self.rhs[r]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
                self.rhs[i] -= f * prhs
        f = obj[0][c]
        if f:
            cost = obj[0]
            for j in nz:
                cost[j] -= f * prow[j]
            obj[1] -= f * prhs
        self.basis[r] = c
        self.pivots += 1

    def run(self, obj, allowed):
        """Minimize; ``obj = [reduced_costs, -value]``.  Returns False if unbounded."""
        cost = obj[0]
        while True:
            enter = next((j for j in range(self.ncols) if allowed[j] and cost[j] < 0), None)
            if enter is None:
                return True
            best = None
            leave = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        best = ratio
                        leave = i
            if leave is None:
                return False
            self.pivot(leave, enter, obj)


def solve(nvars: int, objective: dict, constraints: Sequence, maximize: bool = False) -> LPResult:
    """Optimize ``objective . x`` subject to ``constraints`` and ``x >= 0``."""
    if nvars > MAX_VARS or len(constraints) > MAX_ROWS:
        raise LPBudgetExceeded(
            f"LP with {nvars} variables / {len(constraints)} rows exceeds the desk-scale guard"
        )
    norm = []
    for coeffs, rel, rhs in constraints:
        rhs = _q(rhs)
        coeffs = {j: _q(v) for j, v in coeffs.items() if v}
        if rhs < 0:
            coeffs = {j: -v for j, v in coeffs.items()}
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        norm.append((coeffs, rel, rhs))

    nslack = sum(1 for _, rel, _ in norm if rel != "=")
    nart = sum(1 for _, rel, _ in norm if rel != "<=")
    ncols = nvars + nslack + nart
    art_start = nvars + nslack
    rows, rhs, basis = [], [], []
    s = nvars
    a = art_start
    for coeffs, rel, b in norm:
        row = [ZERO] * ncols
        for j, v in coeffs.items():
            row[j] = v
        if rel == "<=":
            row[s] = ONE
            basis.append(s)
            s += 1
        elif rel == ">=":
            row[s] = -ONE
            s += 1
            row[a] = ONE
            basis.append(a)
            a += 1
        else:
            row[a] = ONE
            basis.append(a)
            a += 1
        rows.append(row)
        rhs.append(b)
    tab = _Tableau(rows, rhs, basis, ncols)

    # phase 1: minimize the sum of artificials
    if nart:
        cost = [ZERO] * ncols
        for j in range(art_start, ncols):
            cost[j] = ONE
        obj = [cost, ZERO]
        for i, bvar in enumerate(basis):
            if bvar >= art_start:
                for j in range(ncols):
                    if rows[i][j]:
                        cost[j] -= rows[i][j]
                obj[1] -= rhs[i]
        tab.run(obj, [True] * ncols)
        if -obj[1] > 0:
            return LPResult("infeasible", pivots=tab.pivots)
        # drive zero-level artificials out of the basis
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= art_start:
                row = tab.rows[i]
                col = next((j for j in range(art_start) if row[j]), None)
                if col is None:
                    del tab.rows[i]
                    del tab.rhs[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, col, [[ZERO] * ncols, ZERO])
            i += 1

    # phase 2
    sign = -1 if maximize else 1
    c = [ZERO] * ncols
    for j, v in objective.items():
        c[j] = sign * _q(v)
    obj = [c[:], ZERO]
    for i, bvar in enumerate(tab.basis):
        cb = c[bvar]
        if cb:
            row = tab.rows[i]
            for j in range(ncols):
                if row[j]:
                    obj[0][j] -= cb * row[j]
            obj[1] -= cb * tab.rhs[i]
    allowed = [j < art_start for j in range(ncols)]
    if not tab.run(obj, allowed):
        return LPResult("unbounded", pivots=tab.pivots)
    x = [Fraction(0)] * nvars
    for i, bvar in enumerate(tab.basis):
        if bvar < nvars:
            x[bvar] = _f(tab.rhs[i])
    value = sum((frac(v) * x[j] for j, v in objective.items()), Fraction(0))
    return LPResult("optimal", x, value, tab.pivots)


class Model:
    """Small helper for building LPs with named variable blocks."""

    def __init__(self):
        self.nvars = 0
        self.constraints = []
        self.names = {}

    def var(self, name=None) -> int:
        j = self.nvars
        self.nvars += 1
        if name is not None:
            self.names[name] = j
        return j

    def add(self, coeffs: dict, rel: str, rhs) -> None:
        self.constraints.append((coeffs, rel, rhs))

    def minimize(self, objective: dict) -> LPResult:
        return solve(self.nvars, objective, self.constraints)

    def maximize(self, objective: dict) -> LPResult:
        return solve(self.nvars, objective, self.constraints, maximize=True)
