from itertools import combinations, product

import pytest
from hypothesis import given, strategies as st

from entlab import circuit as circ
from entlab.circuit import CircuitClassSpec, enumerate_class, parse, size, table_mask
from entlab.errors import BudgetExceeded, CircuitRangeError, CircuitSyntaxError


def brute_force_sizes(n, m, max_size, gates=circ.DEFAULT_GATES):
    """Smallest gate count per truth table by plain straight-line search.

    Independent of the canonical-order pruning used by the enumerator.
    """
    full = (1 << (1 << (n + m))) - 1
    base = [0, full] + list(circ.input_masks(n, m))
    best = {t: 0 for t in base}

    def apply(op, vals):
        if op == "not":
            return full ^ vals[0]
        if op == "and":
            return vals[0] & vals[1]
        if op == "or":
            return vals[0] | vals[1]
        if op == "xor":
            return vals[0] ^ vals[1]
        a, b, c = vals
        return (a & b) | (a & c) | (b & c)

    def rec(pool, depth, cost):
        if depth == 0:
            return
        for op in gates:
            for args in combinations(range(len(pool)), circ.GATE_ARITY[op]):
                v = apply(op, [pool[a] for a in args])
                if v in pool:
                    continue
                if best.get(v, cost + 1) > cost:
                    best[v] = cost
                rec(pool + [v], depth - 1, cost + 1)

    rec(base, max_size, 1)
    return best


@pytest.mark.parametrize("n,m,s", [(1, 1, 2), (2, 1, 2), (2, 0, 3), (1, 2, 2), (2, 1, 3)])
def test_enumeration_matches_brute_force(n, m, s):
    found = enumerate_class(CircuitClassSpec("enumerate", n=n, m=m, max_size=s))
    assert {table_mask(c): size(c) for c in found} == brute_force_sizes(n, m, s)


def test_enumeration_with_majority_gate():
    spec = CircuitClassSpec("enumerate", n=2, m=1, max_size=2, gates=("not", "and", "maj"))
    found = enumerate_class(spec)
    assert {table_mask(c): size(c) for c in found} == brute_force_sizes(2, 1, 2, spec.gates)


def test_enumeration_is_deterministic():
    spec = CircuitClassSpec("enumerate", n=2, m=1, max_size=2)
    a = [circ.to_text(c) for c in enumerate_class(spec)]
    b = [circ.to_text(c) for c in enumerate_class(spec)]
    assert a == b


def test_all_two_input_functions_within_three_gates():
    found = enumerate_class(CircuitClassSpec("enumerate", n=2, m=0, max_size=3))
    assert len(found) == 16


def test_parse_forms_agree():
    a = parse("and(x[0], not(z[1]))", 1, 2)
    b = parse("and(x0, not(z1))", 1, 2)
    assert a.truth_table() == b.truth_table()
    assert size(a) == 2


def test_shared_subexpressions_count_once():
    c = parse("xor(and(x0, x1), and(x0, x1))")
    assert size(c) == 2  # one merged and() plus the xor
    c2 = parse("or(and(x0, x1), not(and(x0, x1)))")
    assert size(c2) == 3


def test_truth_table_order():
    # index a = x * 2^m + z
    c = parse("z0", 1, 1)
    assert c.truth_table() == (0, 1, 0, 1)
    c = parse("x0", 1, 1)
    assert c.truth_table() == (0, 0, 1, 1)


def test_round_trip_text():
    c = parse("maj(x0, x1, not(z0))")
    assert parse(circ.to_text(c)).truth_table() == c.truth_table()


@pytest.mark.parametrize("text", ["and(x0)", "foo(x0)", "and(x0, x1", "x", ""])
def test_syntax_errors(text):
    with pytest.raises(CircuitSyntaxError):
        parse(text)


def test_range_errors():
    with pytest.raises(CircuitRangeError):
        parse("x3", 2, 0)
    with pytest.raises(CircuitRangeError):
        circ.majority(4)


def test_enumeration_guard():
    with pytest.raises(BudgetExceeded):
        CircuitClassSpec("enumerate", n=2, m=1, max_size=9)


@pytest.mark.parametrize("r", [1, 3, 5, 7])
def test_majority_is_exact(r):
    c = circ.majority(r)
    for x in range(1 << r):
        assert circ.evaluate(c, x, 0) == int(bin(x).count("1") > r // 2)


def test_majority_of_five_size():
    assert size(circ.majority(5)) == 12


@given(st.integers(1, 6), st.data())
def test_at_least_counts(r, data):
    k = data.draw(st.integers(0, r + 1))
    c = circ.at_least(r, k)
    for x in range(1 << r):
        assert circ.evaluate(c, x, 0) == int(bin(x).count("1") >= k)


def test_and_of_copies():
    base = parse("xor(x0, z0)", 1, 1)
    c = circ.and_of_copies(base, 3)
    assert size(c) == 3 * size(base) + 2
    for x, z in product(range(8), range(2)):
        want = all(((x >> i) & 1) ^ z for i in range(3))
        assert circ.evaluate(c, x, z) == int(want)


def test_complement():
    c = parse("and(x0, z0)")
    assert [1 - v for v in c.truth_table()] == list(c.complement().truth_table())


def test_explicit_list_dedup():
    spec = CircuitClassSpec("explicit-list", n=1, m=1,
                            sources=("not(not(x0))", "x0", "and(x0, z0)"))
    found = enumerate_class(spec)
    assert len(found) == 2
    assert min(size(c) for c in found) == 0
