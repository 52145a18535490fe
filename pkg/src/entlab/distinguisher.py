"""Distinguishers as exact [0,1]-valued tables over ``(x, z)``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .circuit import Circuit, truth_table, size as circuit_size, to_text
from .dist import ONE, ZERO, Joint, frac
from .errors import BadWeights, DomainMismatch, ZMarginalMismatch

KINDS = ("boolean", "real", "randomized")


@dataclass(frozen=True)
class Distinguisher:
    """``values[x][z]`` in [0, 1].

    Randomized distinguishers are stored through their acceptance
    probabilities.  ``size`` is a gate count, either taken from the source
    circuit or accumulated by the constructions below.
    """

    n: int
    m: int
    values: tuple
    kind: str = "real"
    size: int = 0
    provenance: object = field(default="table", compare=False)

    def __post_init__(self):
        vals = tuple(tuple(frac(v) for v in row) for row in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != 1 << self.n or any(len(r) != 1 << self.m for r in vals):
            raise DomainMismatch(f"table shape does not match n={self.n}, m={self.m}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown distinguisher kind {self.kind!r}")
        for row in vals:
            for v in row:
                if v < 0 or v > 1:
                    raise ValueError(f"distinguisher value {v} outside [0, 1]")
                if self.kind == "boolean" and v not in (0, 1):
                    raise ValueError("boolean distinguisher with non-{0,1} value")

    # constructors
    @classmethod
    def from_flat(cls, n: int, m: int, flat: Sequence, kind=None, size=0, provenance="table"):
        """From a flat x-major list ``flat[x * 2**m + z]``."""
        flat = [frac(v) for v in flat]
        nz = 1 << m
        if len(flat) != (1 << n) * nz:
            raise DomainMismatch(f"expected {(1 << n) * nz} values, got {len(flat)}")
        vals = tuple(tuple(flat[x * nz:(x + 1) * nz]) for x in range(1 << n))
        if kind is None:
            kind = "boolean" if all(v in (0, 1) for v in flat) else "real"
        return cls(n, m, vals, kind, size, provenance)

    @classmethod
    def from_circuit(cls, c: Circuit, n: int | None = None, m: int | None = None):
        """Tabulate a circuit, optionally widening its arity to ``(n, m)``."""
        n = c.n if n is None else n
        m = c.m if m is None else m
        if n < c.n or m < c.m:
            raise DomainMismatch("circuit reads inputs beyond the requested arity")
        if (n, m) != (c.n, c.m):
            c = Circuit(n, m, c.nodes, c.output)
        return cls.from_flat(n, m, truth_table(c), "boolean", circuit_size(c), to_text(c))

    @classmethod
    def constant(cls, n: int, m: int, value=ZERO):
        v = frac(value)
        kind = "boolean" if v in (0, 1) else "real"
        return cls(n, m, tuple((v,) * (1 << m) for _ in range(1 << n)), kind, 0, f"const {v}")

    @classmethod
    def from_x_function(cls, values: Sequence, m: int = 0, kind=None):
        """A distinguisher that ignores ``z``."""
        vals = [frac(v) for v in values]
        n = len(vals).bit_length() - 1
        return cls.from_flat(n, m, [v for v in vals for _ in range(1 << m)], kind)

    @property
    def is_boolean(self) -> bool:
        return all(v in (0, 1) for row in self.values for v in row)

    def column(self, z: int) -> tuple:
        return tuple(row[z] for row in self.values)

    def flat(self) -> list:
        return [v for row in self.values for v in row]

    def slice_z(self, keep) -> "Distinguisher":
        """Restrict to a sub-domain of z: ``keep`` lists the z values kept."""
        keep = list(keep)
        m = len(keep).bit_length() - 1
        return Distinguisher(
            self.n, m, tuple(tuple(row[z] for z in keep) for row in self.values),
            self.kind, self.size, ("slice", self.provenance),
        )


def _check(d: Distinguisher, j: Joint):
    if d.n != j.n or d.m != j.m:
        raise DomainMismatch(f"distinguisher on ({d.n},{d.m}) bits, joint on ({j.n},{j.m})")


def expect(d: Distinguisher, j: Joint) -> Fraction:
    _check(d, j)
    total = ZERO
    for drow, prow in zip(d.values, j.probs):
        for v, p in zip(drow, prow):
            if v and p:
                total += v * p
    return total


def advantage(d: Distinguisher, jp: Joint, jq: Joint) -> Fraction:
    return abs(expect(d, jp) - expect(d, jq))


class AdvantageProfile(NamedTuple):
    """Per-z signed gaps ``E D(X|z, z) - E D(Y|z, z)`` and their aggregates."""

    gaps: tuple
    z_marginal: tuple
    metric: Fraction
    modulus: Fraction

    @property
    def squared(self) -> Fraction:
        return sum((p * g * g for p, g in zip(self.z_marginal, self.gaps)), ZERO)


def column_expect(values: Sequence, probs: Sequence) -> Fraction:
    return sum((v * p for v, p in zip(values, probs) if v and p), ZERO)


def advantage_profile(d: Distinguisher, jp: Joint, jq: Joint) -> AdvantageProfile:
    _check(d, jp)
    _check(d, jq)
    zm = jp.z_marginal()
    if zm != jq.z_marginal():
        raise ZMarginalMismatch("joints do not share the same Z-marginal")
    gaps = []
    for z in range(jp.nz):
        if zm[z] == 0:
            gaps.append(ZERO)
            continue
        col = d.column(z)
        diff = column_expect(col, jp.column(z)) - column_expect(col, jq.column(z))
        gaps.append(diff / zm[z])
    metric = sum((p * g for p, g in zip(zm, gaps)), ZERO)
    modulus = sum((p * abs(g) for p, g in zip(zm, gaps)), ZERO)
    return AdvantageProfile(tuple(gaps), zm, metric, modulus)


def complement(d: Distinguisher) -> Distinguisher:
    """``1 - D``; costs one extra gate."""
    return Distinguisher(
        d.n, d.m, tuple(tuple(ONE - v for v in row) for row in d.values),
        d.kind, d.size + 1, ("not", d.provenance),
    )


def complement_closure(cls: Sequence[Distinguisher]) -> list:
    """Add ``D^c`` for every member whose complement table is missing."""
    out = list(cls)
    tables = {d.values for d in out}
    for d in cls:
        c = complement(d)
        if c.values not in tables:
            tables.add(c.values)
            out.append(c)
    return out


def is_complement_closed(cls: Sequence[Distinguisher]) -> bool:
    tables = {d.values for d in cls}
    return all(tuple(tuple(ONE - v for v in row) for row in d.values) in tables for d in cls)


def convex_combine(parts: Sequence) -> Distinguisher:
    """Pointwise ``sum_i w_i D_i`` for ``parts = [(w_i, D_i), ...]``.

    Size bookkeeping: sum of part sizes plus one gate per part.
    """
    parts = [(frac(w), d) for w, d in parts]
    if not parts:
        raise BadWeights("empty combination")
    if any(w < 0 for w, _ in parts) or sum(w for w, _ in parts) != 1:
        raise BadWeights("weights must be nonnegative and sum to 1")
    n, m = parts[0][1].n, parts[0][1].m
    if any((d.n, d.m) != (n, m) for _, d in parts):
        raise DomainMismatch("combined distinguishers live on different domains")
    vals = [[ZERO] * (1 << m) for _ in range(1 << n)]
    for w, d in parts:
        if not w:
            continue
        for x in range(1 << n):
            row = vals[x]
            for z, v in enumerate(d.values[x]):
                if v:
                    row[z] += w * v
    boolean = all(v in (0, 1) for row in vals for v in row)
    kinds = {d.kind for _, d in parts}
    kind = "boolean" if boolean else ("randomized" if "randomized" in kinds else "real")
    record = ("combo", tuple((str(w), d.provenance) for w, d in parts))
    return Distinguisher(n, m, tuple(map(tuple, vals)), kind,
                         sum(d.size for _, d in parts) + len(parts), record)


def threshold(d: Distinguisher, t) -> Distinguisher:
    """Boolean ``[D(x, z) > t]``; one extra gate."""
    t = frac(t)
    return Distinguisher(
        d.n, d.m, tuple(tuple(ONE if v > t else ZERO for v in row) for row in d.values),
        "boolean", d.size + 1, ("threshold", str(t), d.provenance),
    )


_SIGN = {"keep": 1, "flip": -1, "zero": 0, 1: 1, -1: -1, 0: 0}


def flip_select(d: Distinguisher, signs: Sequence) -> Distinguisher:
    """Per-z choice of ``D``, ``1 - D`` or the constant 0.

    ``signs[z]`` is ``"keep" | "flip" | "zero"`` (or ``1 | -1 | 0``).  Each
    non-keep z adds one gate to the size.
    """
    if len(signs) != 1 << d.m:
        raise DomainMismatch("need one sign per z value")
    s = [_SIGN[v] for v in signs]
    vals = []
    for row in d.values:
        vals.append(tuple(v if s[z] == 1 else (ONE - v if s[z] == -1 else ZERO)
                          for z, v in enumerate(row)))
    kind = d.kind
    return Distinguisher(d.n, d.m, tuple(vals), kind, d.size + sum(1 for v in s if v != 1),
                         ("flip_select", tuple(s), d.provenance))


def signs_of(profile: AdvantageProfile) -> list:
    return [1 if g > 0 else (-1 if g < 0 else 0) for g in profile.gaps]
