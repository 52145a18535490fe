"""Shared hypothesis strategies: small exact joints and distinguisher tables."""

from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from entlab.dist import Joint
from entlab.distinguisher import Distinguisher

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def joints(draw, max_n=3, max_m=2, split=False, denom=64):
    n = draw(st.integers(1, max_n))
    if split:
        m1, m2 = draw(st.integers(0, max_m)), draw(st.integers(0, max_m))
        m = m1 + m2
    else:
        m = draw(st.integers(0, max_m))
    cells = (1 << n) << m
    # one reserved unit per z-column keeps every column alive
    units = draw(st.lists(st.integers(0, 8), min_size=cells, max_size=cells))
    nz = 1 << m
    for z in range(nz):
        units[z] += 1
    total = sum(units)
    table = [[Fraction(units[x * nz + z], total) for z in range(nz)] for x in range(1 << n)]
    return Joint.from_table(table, z_split=(m1, m2) if split else None)


@st.composite
def boolean_tables(draw, n, m, count=None):
    size = (1 << n) << m
    k = count if count is not None else draw(st.integers(1, 4))
    return [Distinguisher.from_flat(n, m, draw(st.lists(st.integers(0, 1), min_size=size,
                                                         max_size=size)), "boolean")
            for _ in range(k)]


@st.composite
def real_tables(draw, n, m, count=None, levels=4):
    size = (1 << n) << m
    k = count if count is not None else draw(st.integers(1, 4))
    out = []
    for _ in range(k):
        vals = draw(st.lists(st.integers(0, levels), min_size=size, max_size=size))
        out.append(Distinguisher.from_flat(n, m, [Fraction(v, levels) for v in vals], "real"))
    return out


@pytest.fixture
def diagonal_joint():
    half = Fraction(1, 2)
    return Joint.from_table([[half, 0], [0, half]])


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
