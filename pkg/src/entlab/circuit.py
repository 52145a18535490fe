"""A tiny boolean-circuit language for distinguishers.

Grammar::

    expr := x[i] | z[j] | xI | zJ | 0 | 1
          | not(expr) | and(expr, expr) | or(expr, expr)
          | xor(expr, expr) | maj(expr, expr, expr)

Circuits are DAGs: identical subexpressions are merged when parsed.  Size is
the number of logic gates; inputs and constants are free.

Truth tables enumerate assignments in x-major order: assignment index
``a = x * 2**m + z`` where ``x[i]`` is bit ``i`` of the integer ``x`` and
``z[j]`` is bit ``j`` of ``z``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from .errors import BudgetExceeded, CircuitRangeError, CircuitSyntaxError

GATE_ARITY = {"not": 1, "and": 2, "or": 2, "xor": 2, "maj": 3}
LEAVES = ("x", "z", "const")
DEFAULT_GATES = ("not", "and", "or", "xor")
MAX_ENUM_SIZE = 4
MAX_ENUM_ARITY = 8


@dataclass(frozen=True)
class Circuit:
    """Single-output circuit over ``n`` x-bits and ``m`` z-bits.

    ``nodes`` is a topologically ordered tuple of ``(op, args)`` pairs.  Leaf
    nodes are ``("x", (i,))``, ``("z", (j,))`` and ``("const", (b,))``; gate
    nodes reference earlier node indices.
    """

    n: int
    m: int
    nodes: tuple
    output: int
    _table: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise CircuitRangeError("negative arity")
        if not 0 <= self.output < len(self.nodes):
            raise CircuitRangeError("output index out of range")
        for idx, (op, args) in enumerate(self.nodes):
            if op == "x":
                if not 0 <= args[0] < self.n:
                    raise CircuitRangeError(f"x[{args[0]}] out of range for n={self.n}")
            elif op == "z":
                if not 0 <= args[0] < self.m:
                    raise CircuitRangeError(f"z[{args[0]}] out of range for m={self.m}")
            elif op == "const":
                if args[0] not in (0, 1):
                    raise CircuitRangeError("constants must be 0 or 1")
            elif op in GATE_ARITY:
                if len(args) != GATE_ARITY[op]:
                    raise CircuitRangeError(f"{op} takes {GATE_ARITY[op]} arguments")
                if any(not 0 <= a < idx for a in args):
                    raise CircuitRangeError("gate arguments must reference earlier nodes")
            else:
                raise CircuitRangeError(f"unknown node kind {op!r}")

    @property
    def arity(self) -> int:
        return self.n + self.m

    def size(self) -> int:
        return size(self)

    def truth_table(self) -> tuple:
        return truth_table(self)

    def complement(self) -> "Circuit":
        return Circuit(self.n, self.m, self.nodes + (("not", (self.output,)),), len(self.nodes))

    def __str__(self):
        return to_text(self)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<ref>[xz])\s*(?:\[\s*(?P<bidx>\d+)\s*\]|(?P<idx>\d+))"
    r"|(?P<name>not|and|or|xor|maj)\b|(?P<const>[01])\b|(?P<punct>[(),]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        mt = _TOKEN.match(text, pos)
        if mt is None or mt.end() == pos:
            raise CircuitSyntaxError(f"unexpected character {text[pos:pos + 1].strip() or text[pos]!r}",
                                     pos)
        start = mt.start() + (len(mt.group(0)) - len(mt.group(0).lstrip()))
        if mt.group("ref"):
            idx = mt.group("bidx") or mt.group("idx")
            tokens.append(("ref", (mt.group("ref"), int(idx)), start))
        elif mt.group("name"):
            tokens.append(("name", mt.group("name"), start))
        elif mt.group("const") is not None:
            tokens.append(("const", int(mt.group("const")), start))
        else:
            tokens.append((mt.group("punct"), None, start))
        pos = mt.end()
    tokens.append(("eof", None, len(text)))
    return tokens


class _Builder:
    """Hash-consing node store."""

    def __init__(self):
        self.nodes = []
        self.index = {}

    def add(self, op, args) -> int:
        key = (op, tuple(args))
        if key not in self.index:
            self.index[key] = len(self.nodes)
            self.nodes.append(key)
        return self.index[key]


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0
        self.b = _Builder()
        self.max_x = -1
        self.max_z = -1

    def peek(self):
        return self.tokens[self.i]

    def expect(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            found = tok[0] if tok[0] != "eof" else "end of input"
            raise CircuitSyntaxError(f"expected {kind!r}, found {found!r}", tok[2])
        self.i += 1
        return tok

    def expr(self) -> int:
        kind, val, pos = self.peek()
        if kind == "ref":
            self.i += 1
            var, idx = val
            if var == "x":
                self.max_x = max(self.max_x, idx)
            else:
                self.max_z = max(self.max_z, idx)
            return self.b.add(var, (idx,))
        if kind == "const":
            self.i += 1
            return self.b.add("const", (val,))
        if kind == "name":
            self.i += 1
            self.expect("(")
            args = [self.expr()]
            while self.peek()[0] == ",":
                self.i += 1
                args.append(self.expr())
            self.expect(")")
            if len(args) != GATE_ARITY[val]:
                raise CircuitSyntaxError(
                    f"{val} takes {GATE_ARITY[val]} argument(s), got {len(args)}", pos
                )
            return self.b.add(val, tuple(args))
        found = kind if kind != "eof" else "end of input"
        raise CircuitSyntaxError(f"unexpected {found!r}", pos)


def parse(text: str, n: int | None = None, m: int | None = None) -> Circuit:
    """Parse one DSL expression.

    ``n``/``m`` default to the smallest arities covering the referenced
    inputs; passing them explicitly range-checks the references.
    """
    p = _Parser(text)
    out = p.expr()
    p.expect("eof")
    if n is None:
        n = p.max_x + 1
    elif p.max_x >= n:
        raise CircuitRangeError(f"x[{p.max_x}] out of range for n={n}")
    if m is None:
        m = p.max_z + 1
    elif p.max_z >= m:
        raise CircuitRangeError(f"z[{p.max_z}] out of range for m={m}")
    return Circuit(n, m, tuple(p.b.nodes), out)


def parse_file(path, n=None, m=None) -> list:
    """Read a ``.dsl`` file: one circuit per line, ``#`` comments."""
    out = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse(line, n, m))
    return out


def to_text(c: Circuit) -> str:
    """Canonical expression text (shared nodes are expanded)."""

    @lru_cache(maxsize=None)
    def render(i):
        op, args = c.nodes[i]
        if op in ("x", "z"):
            return f"{op}{args[0]}"
        if op == "const":
            return str(args[0])
        return f"{op}({', '.join(render(a) for a in args)})"

    return render(c.output)


# ---------------------------------------------------------------------------
# evaluation


def _reachable(c: Circuit) -> list:
    seen = set()
    stack = [c.output]
    while stack:
        i = stack.pop()
        if i in seen:
            continue
        seen.add(i)
        stack.extend(c.nodes[i][1] if c.nodes[i][0] in GATE_ARITY else ())
    return sorted(seen)


def size(c: Circuit) -> int:
    return sum(1 for i in _reachable(c) if c.nodes[i][0] in GATE_ARITY)


@lru_cache(maxsize=64)
def input_masks(n: int, m: int) -> tuple:
    """Bit-parallel masks for ``x[0..n-1]`` then ``z[0..m-1]``."""
    total = 1 << (n + m)
    masks = []
    for i in range(n):
        masks.append(sum(1 << a for a in range(total) if (a >> (m + i)) & 1))
    for j in range(m):
        masks.append(sum(1 << a for a in range(total) if (a >> j) & 1))
    return tuple(masks)


def _gate(op, vals, full):
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


def table_mask(c: Circuit) -> int:
    """Truth table as an int; bit ``a`` is the output on assignment ``a``."""
    masks = input_masks(c.n, c.m)
    full = (1 << (1 << c.arity)) - 1
    vals = [0] * len(c.nodes)
    for i in _reachable(c):
        op, args = c.nodes[i]
        if op == "x":
            vals[i] = masks[args[0]]
        elif op == "z":
            vals[i] = masks[c.n + args[0]]
        elif op == "const":
            vals[i] = full if args[0] else 0
        else:
            vals[i] = _gate(op, [vals[a] for a in args], full)
    return vals[c.output]


def truth_table(c: Circuit) -> tuple:
    if c._table is None:
        mask = table_mask(c)
        object.__setattr__(c, "_table", tuple((mask >> a) & 1 for a in range(1 << c.arity)))
    return c._table


def evaluate(c: Circuit, x: int, z: int) -> int:
    """Gate-by-gate evaluation on one assignment (no bit tricks)."""
    vals = {}
    for i in _reachable(c):
        op, args = c.nodes[i]
        if op == "x":
            vals[i] = (x >> args[0]) & 1
        elif op == "z":
            vals[i] = (z >> args[0]) & 1
        elif op == "const":
            vals[i] = args[0]
        else:
            a = [vals[j] for j in args]
            if op == "not":
                vals[i] = 1 - a[0]
            elif op == "and":
                vals[i] = a[0] & a[1]
            elif op == "or":
                vals[i] = a[0] | a[1]
            elif op == "xor":
                vals[i] = a[0] ^ a[1]
            else:
                vals[i] = 1 if sum(a) >= 2 else 0
    return vals[c.output]


# ---------------------------------------------------------------------------
# composition


def combine(op: str, *parts: Circuit) -> Circuit:
    """``op(parts...)`` wiring the parts side by side without merging."""
    if len(parts) != GATE_ARITY[op]:
        raise CircuitRangeError(f"{op} takes {GATE_ARITY[op]} arguments")
    n = max(p.n for p in parts)
    m = max(p.m for p in parts)
    nodes = []
    outs = []
    for p in parts:
        base = len(nodes)
        for o, args in p.nodes:
            nodes.append((o, args) if o in LEAVES else (o, tuple(a + base for a in args)))
        outs.append(p.output + base)
    nodes.append((op, tuple(outs)))
    return Circuit(n, m, tuple(nodes), len(nodes) - 1)


def and_of_copies(c: Circuit, k: int) -> Circuit:
    """``D_1 & ... & D_k`` on disjoint x-blocks sharing z.

    Copy ``i`` reads ``x[i*n + j]``.  Size is ``k*size(c) + k - 1``.
    """
    if k < 1:
        raise ValueError("need at least one copy")
    nodes = []
    outs = []
    for i in range(k):
        base = len(nodes)
        for o, args in c.nodes:
            if o == "x":
                nodes.append(("x", (args[0] + i * c.n,)))
            elif o in LEAVES:
                nodes.append((o, args))
            else:
                nodes.append((o, tuple(a + base for a in args)))
        outs.append(c.output + base)
    acc = outs[0]
    for o in outs[1:]:
        nodes.append(("and", (acc, o)))
        acc = len(nodes) - 1
    return Circuit(c.n * k, c.m, tuple(nodes), acc)


def at_least(r: int, k: int) -> Circuit:
    """``[x0 + ... + x{r-1} >= k]`` over ``r`` x-bits.

    Built from ``T(i, j) = or(and(x[i-1], T(i-1, j-1)), T(i-1, j))`` with
    constant folding, so the size is ``O(r * k)``.
    """
    if r < 1 or not 0 <= k <= r + 1:
        raise CircuitRangeError(f"bad threshold {k} of {r}")
    nodes = [("const", (0,)), ("const", (1,))]
    FALSE, TRUE = 0, 1
    memo = {}

    def emit(op, args):
        nodes.append((op, args))
        return len(nodes) - 1

    def cell(i, j):
        if j <= 0:
            return TRUE
        if j > i:
            return FALSE
        if (i, j) in memo:
            return memo[i, j]
        leaf = emit("x", (i - 1,))
        take = cell(i - 1, j - 1)
        take = leaf if take == TRUE else emit("and", (leaf, take))
        skip = cell(i - 1, j)
        out = take if skip == FALSE else emit("or", (take, skip))
        memo[i, j] = out
        return out

    out = cell(r, k)
    return Circuit(r, 0, tuple(nodes), out)


def majority(r: int) -> Circuit:
    """Strict majority of ``r`` (odd) bits."""
    if r % 2 == 0:
        raise CircuitRangeError("majority needs an odd number of inputs")
    return at_least(r, (r + 1) // 2)


# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class CircuitClassSpec:
    """How to obtain a class of circuits.

    ``kind`` is ``"explicit-list"`` (``sources`` are DSL strings),
    ``"dsl-files"`` (``sources`` are paths) or ``"enumerate"``.
    """

    kind: str
    n: int = 0
    m: int = 0
    sources: tuple = ()
    gates: tuple = DEFAULT_GATES
    max_size: int = 1
    dedup: bool = True
    budget: int = 2_000_000

    def __post_init__(self):
        if self.kind not in ("explicit-list", "dsl-files", "enumerate"):
            raise ValueError(f"unknown class kind {self.kind!r}")
        if self.kind == "enumerate":
            if self.max_size > MAX_ENUM_SIZE:
                raise BudgetExceeded(f"enumeration size {self.max_size} exceeds guard {MAX_ENUM_SIZE}")
            if self.n + self.m > MAX_ENUM_ARITY:
                raise BudgetExceeded(f"enumeration arity {self.n + self.m} exceeds guard {MAX_ENUM_ARITY}")
            bad = set(self.gates) - set(GATE_ARITY)
            if bad:
                raise ValueError(f"unknown gates {sorted(bad)}")


def _leaf_nodes(n, m):
    return [("const", (0,)), ("const", (1,))] + [("x", (i,)) for i in range(n)] + [
        ("z", (j,)) for j in range(m)
    ]


def _program_circuit(n, m, leaves, program, out):
    """Turn a straight-line program into a compact Circuit."""
    b = _Builder()
    remap = {}

    def emit(ref):
        if ref in remap:
            return remap[ref]
        if ref < len(leaves):
            idx = b.add(*leaves[ref])
        else:
            op, args = program[ref - len(leaves)]
            idx = b.add(op, tuple(emit(a) for a in args))
        remap[ref] = idx
        return idx

    top = emit(out)
    return Circuit(n, m, tuple(b.nodes), top)


def _enumerate(spec: CircuitClassSpec) -> list:
    n, m = spec.n, spec.m
    leaves = _leaf_nodes(n, m)
    masks = input_masks(n, m)
    full = (1 << (1 << (n + m))) - 1
    leaf_tables = [0, full] + list(masks)
    gates = [g for g in ("not", "and", "or", "xor", "maj") if g in spec.gates]

    found = {}  # table -> circuit (smallest first)
    everything = []
    for i, tab in enumerate(leaf_tables):
        c = _program_circuit(n, m, leaves, [], i)
        everything.append(c)
        found.setdefault(tab, c)

    work = [0]

    def options(pool_size):
        for op in gates:
            k = GATE_ARITY[op]
            if k == 1:
                for a in range(pool_size):
                    yield op, (a,)
            elif k == 2:
                for a in range(pool_size):
                    for b in range(a + 1, pool_size):
                        yield op, (a, b)
            else:
                for a in range(pool_size):
                    for b in range(a + 1, pool_size):
                        for c in range(b + 1, pool_size):
                            yield op, (a, b, c)

    def dfs(program, tables, depth):
        pool = len(tables)
        last = pool - 1
        prev_key = program[-1] if program else None
        for op, args in options(pool):
            work[0] += 1
            if work[0] > spec.budget:
                raise BudgetExceeded(f"circuit enumeration exceeded {spec.budget} steps")
            # canonical order: a gate either uses the previous gate or sorts after it
            if prev_key is not None and last not in args and (args, op) <= (prev_key[1], prev_key[0]):
                continue
            if op == "not" and args[0] < 2:
                continue
            val = _gate(op, [tables[a] for a in args], full)
            if val in tables:
                continue
            prog = program + [(op, args)]
            out = pool
            if depth == 1:
                used = set()
                for _, a in prog:
                    used.update(a)
                if all(len(leaves) + g in used for g in range(len(prog) - 1)):
                    c = _program_circuit(n, m, leaves, prog, out)
                    if spec.dedup:
                        if val not in found:
                            found[val] = c
                    else:
                        everything.append(c)
            else:
                dfs(prog, tables + [val], depth - 1)

    for s in range(1, spec.max_size + 1):
        dfs([], leaf_tables, s)

    if spec.dedup:
        result = list(found.values())
    else:
        result = everything
    result.sort(key=lambda c: (size(c), table_mask(c), to_text(c)))
    return result


def enumerate_class(spec: CircuitClassSpec) -> list:
    """Materialize a circuit class, deterministically ordered.

    With ``dedup`` the result holds one smallest witness per truth table.
    """
    if spec.kind == "explicit-list":
        circuits = [parse(s, spec.n, spec.m) for s in spec.sources]
    elif spec.kind == "dsl-files":
        circuits = [c for p in spec.sources for c in parse_file(p, spec.n, spec.m)]
    else:
        return _enumerate(spec)
    if spec.dedup:
        seen = {}
        for c in circuits:
            key = table_mask(c)
            if key not in seen or size(c) < size(seen[key]):
                seen[key] = c
        circuits = list(seen.values())
    return circuits


def dedup_tables(circuits: Iterable[Circuit]) -> list:
    seen = {}
    for c in circuits:
        key = table_mask(c)
        if key not in seen or size(c) < size(seen[key]):
            seen[key] = c
    return sorted(seen.values(), key=lambda c: (size(c), table_mask(c), to_text(c)))


def from_sources(sources: Sequence[str], n: int, m: int) -> list:
    return [parse(s, n, m) for s in sources]
