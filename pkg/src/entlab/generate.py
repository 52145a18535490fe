"""Deterministic random instances.

Every generator takes a :class:`random.Random`; :func:`instance_rng` derives
one from ``(label, seed, index)`` through a string seed, which Python hashes
with SHA-512, so streams do not depend on ``PYTHONHASHSEED`` or on the order
in which instances are produced.

Joints are dyadic: every cell is a multiple of ``2**-denom_bits``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import circuit as circ
from .dist import MAX_BITS, Dist, EntropyParams, Joint
from .distinguisher import Distinguisher, complement, complement_closure
from .errors import BudgetExceeded
from .scenario import Scenario

MAX_GENERATED_BITS = 8  # n + m for random tables


def instance_rng(label: str, seed: int, index: int = 0) -> random.Random:
    return random.Random(f"{label}/{seed}/{index}")


def _composition(rng: random.Random, total: int, parts: int) -> list:
    """Uniformly random cut of ``total`` units into ``parts`` nonnegative parts."""
    cuts = sorted(rng.randint(0, total) for _ in range(parts - 1))
    return [b - a for a, b in zip([0] + cuts, cuts + [total])]


def random_joint(rng: random.Random, n: int, m: int, denom_bits: int = 10,
                 z_split=None) -> Joint:
    """Dyadic joint of ``(X, Z)`` with every z-column carrying mass."""
    if n + m > MAX_BITS:
        raise BudgetExceeded(f"{n + m} bits exceeds the domain guard")
    nx, nz = 1 << n, 1 << m
    total = 1 << denom_bits
    if total < nz:
        raise BudgetExceeded(f"2^{denom_bits} units cannot cover {nz} z-columns")
    units = _composition(rng, total - nz, nx * nz)
    for z in range(nz):  # one reserved unit per column keeps P(z) > 0
        units[rng.randrange(nx) * nz + z] += 1
    table = [[Fraction(units[x * nz + z], total) for z in range(nz)] for x in range(nx)]
    return Joint.from_table(table, z_split=z_split)


def random_dist(rng: random.Random, n: int, denom_bits: int = 10) -> Dist:
    units = _composition(rng, 1 << denom_bits, 1 << n)
    return Dist.from_probs([Fraction(u, 1 << denom_bits) for u in units])


def random_conditionals_like(rng: random.Random, j: Joint, denom_bits: int = 10) -> Joint:
    """A second joint with the same Z-marginal and fresh ``Y | Z``."""
    return j.with_x_conditionals([random_dist(rng, j.n, denom_bits) for _ in range(j.nz)])


def random_boolean(rng: random.Random, n: int, m: int) -> Distinguisher:
    flat = [rng.randint(0, 1) for _ in range((1 << n) << m)]
    return Distinguisher.from_flat(n, m, flat, "boolean", provenance="random table")


def random_real(rng: random.Random, n: int, m: int, levels: int = 4) -> Distinguisher:
    flat = [Fraction(rng.randint(0, levels), levels) for _ in range((1 << n) << m)]
    return Distinguisher.from_flat(n, m, flat, "real", provenance="random table")


def random_class(rng: random.Random, n: int, m: int, size: int, boolean: bool = True,
                 closed: bool = False) -> list:
    make = random_boolean if boolean else random_real
    members = [make(rng, n, m) for _ in range(size)]
    return complement_closure(members) if closed else members


def random_gamma(rng: random.Random, n: int) -> Fraction:
    """A guessing probability ``j / 2^n`` with ``1 <= j <= 2^n``."""
    return Fraction(rng.randint(1, 1 << n), 1 << n)


@dataclass(frozen=True)
class InstanceSpec:
    """Shape of a generated scenario.

    ``class_kind`` is ``boolean``, ``real`` or ``enumerate`` (all circuits
    with at most ``max_gates`` gates, one per truth table).
    """

    n: int = 2
    m: int = 2
    m1: int | None = None
    m2: int | None = None
    class_size: int = 4
    class_kind: str = "boolean"
    max_gates: int = 1
    complement_closed: bool = False
    denom_bits: int = 10
    gamma: Fraction | None = None
    epsilon: Fraction = Fraction(0)

    def __post_init__(self):
        if self.m1 is not None or self.m2 is not None:
            if self.m1 is None or self.m2 is None or self.m1 + self.m2 != self.m:
                raise ValueError("m1 + m2 must equal m")
        if self.n + self.m > MAX_GENERATED_BITS:
            raise BudgetExceeded(f"n + m = {self.n + self.m} exceeds {MAX_GENERATED_BITS}")


def generate_instance(spec: InstanceSpec = InstanceSpec(), seed: int = 0, index: int = 0,
                      label: str = "scenario") -> Scenario:
    """Random scenario, identical for identical ``(spec, seed, index, label)``."""
    rng = instance_rng(label, seed, index)
    split = (spec.m1, spec.m2) if spec.m1 is not None else None
    j = random_joint(rng, spec.n, spec.m, spec.denom_bits, split)
    if spec.class_kind == "enumerate":
        cs = circ.CircuitClassSpec("enumerate", n=spec.n, m=spec.m, max_size=spec.max_gates)
        cls = [Distinguisher.from_circuit(c, spec.n, spec.m) for c in circ.enumerate_class(cs)]
        if spec.complement_closed:
            cls = complement_closure(cls)
        class_spec = {"kind": "enumerate", "max_size": spec.max_gates,
                      "complement": spec.complement_closed}
    else:
        cls = random_class(rng, spec.n, spec.m, spec.class_size, spec.class_kind == "boolean",
                           spec.complement_closed)
        class_spec = {"kind": "table", "tables": [[str(v) for v in d.flat()] for d in cls]}
    gamma = spec.gamma if spec.gamma is not None else random_gamma(rng, spec.n)
    params = EntropyParams(gamma, spec.epsilon)
    return Scenario(j, cls, params, {"seed": seed, "index": index}, class_spec)


# ---------------------------------------------------------------------------
# violating instances: X piles its mass where D says 1


def _random_set(rng, size, count):
    return sorted(rng.sample(range(size), count))


def concentrated_instance(rng: random.Random, n: int, m: int, mass=Fraction(7, 8),
                          set_sizes=(1, 2), flip_some: bool = True, denom_bits: int = 6):
    """``(joint, D)`` with ``X | z`` putting ``mass`` on the small accepting
    set of ``D(., z)`` and the rest uniformly on all of ``{0,1}^n``.

    With ``flip_some`` a random subset of columns is complemented, so the
    violation shows up with either sign.
    """
    nx, nz = 1 << n, 1 << m
    mass = Fraction(mass)
    total_units = (1 << denom_bits)
    units = _composition(rng, total_units - nz, nz)
    zm = [Fraction(u + 1, total_units) for u in units]
    sets, flips = [], []
    conds = []
    for z in range(nz):
        s = _random_set(rng, nx, min(rng.choice(set_sizes), nx))
        sets.append(s)
        flips.append(flip_some and rng.random() < 0.5)
        probs = [(1 - mass) / nx + (mass / len(s) if x in s else 0) for x in range(nx)]
        conds.append(Dist.from_probs(probs))
    j = Joint.from_conditionals(zm, conds)
    flat = [0] * (nx * nz)
    for z, s in enumerate(sets):
        for x in range(nx):
            inside = x in s
            flat[x * nz + z] = int(inside != flips[z])
    d = Distinguisher.from_flat(n, m, flat, "boolean", provenance="concentrated table")
    return j, d


def concentrated_real(rng: random.Random, n: int, m: int, levels: int = 4,
                      mass=Fraction(3, 4), denom_bits: int = 6):
    """``(joint, D)`` with real-valued ``D`` whose top values sit under X."""
    j, d = concentrated_instance(rng, n, m, mass, (1, 2), False, denom_bits)
    flat = []
    for x in range(1 << n):
        for z in range(1 << m):
            if d.values[x][z]:
                flat.append(Fraction(rng.randint(levels // 2 + 1, levels), levels))
            else:
                flat.append(Fraction(rng.randint(0, levels // 2), levels))
    dr = Distinguisher.from_flat(n, m, flat, "real", provenance="concentrated real table")
    if rng.random() < 0.5:
        dr = complement(dr)
    return j, dr


def random_injective(rng: random.Random, m: int = 2, n: int = 4, max_gates: int = 1) -> list:
    """``n`` single-output circuits over ``m`` inputs whose joint output is injective."""
    cs = circ.CircuitClassSpec("enumerate", n=m, m=0, max_size=max_gates)
    pool = circ.enumerate_class(cs)
    for _ in range(1000):
        f = [rng.choice(pool) for _ in range(n)]
        outs = {tuple(circ.evaluate(c, u, 0) for c in f) for u in range(1 << m)}
        if len(outs) == 1 << m:
            return f
    raise BudgetExceeded("no injective choice found")
