"""Exact finite distributions over bitstring domains.

Probabilities are :class:`fractions.Fraction` throughout.  Entropy levels are
carried as guessing probabilities ``gamma = 2**-k`` so that every comparison
in the package stays rational; ``-log2`` only appears in :func:`bits`.

Joint tables are indexed ``probs[x][z]`` (x-major).  When the conditioning
variable is a pair ``(Z1, Z2)`` over ``m1 + m2`` bits, the integer ``z``
packs ``z1`` into the low ``m1`` bits: ``z = z1 + (z2 << m1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    DomainError,
    DomainMismatch,
    InvalidDistribution,
    ZeroMassCondition,
)

MAX_BITS = 16

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(v) -> Fraction:
    """Coerce ints, ``"p/q"`` strings and Fractions to a Fraction.

    Floats are converted exactly (binary expansion), never rounded.
    """
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        return Fraction(int(v))
    if isinstance(v, (int, str)):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    raise TypeError(f"cannot interpret {v!r} as an exact rational")


def bits(gamma) -> float:
    """Display helper: ``-log2(gamma)``."""
    gamma = frac(gamma)
    if gamma <= 0:
        return math.inf
    return -math.log2(gamma.numerator) + math.log2(gamma.denominator)


@dataclass(frozen=True)
class Domain:
    bits: int

    def __post_init__(self):
        if not isinstance(self.bits, int) or self.bits < 0:
            raise DomainError(f"domain bits must be a nonnegative int, got {self.bits!r}")
        if self.bits > MAX_BITS:
            raise DomainError(f"domain of {self.bits} bits exceeds the {MAX_BITS}-bit guard")

    @property
    def size(self) -> int:
        return 1 << self.bits


def _check_probs(values: Sequence[Fraction]) -> None:
    for p in values:
        if p < 0 or p > 1:
            raise InvalidDistribution(f"probability {p} outside [0, 1]")


@dataclass(frozen=True)
class Dist:
    """A distribution over ``{0,1}^bits``."""

    domain: Domain
    probs: tuple

    def __post_init__(self):
        probs = tuple(frac(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) != self.domain.size:
            raise InvalidDistribution(
                f"expected {self.domain.size} probabilities, got {len(probs)}"
            )
        _check_probs(probs)
        if sum(probs) != 1:
            raise InvalidDistribution(f"probabilities sum to {sum(probs)}, not 1")

    @classmethod
    def from_probs(cls, probs: Iterable) -> "Dist":
        probs = tuple(probs)
        b = len(probs).bit_length() - 1
        if 1 << b != len(probs):
            raise DomainError(f"length {len(probs)} is not a power of two")
        return cls(Domain(b), probs)

    @classmethod
    def uniform(cls, n: int) -> "Dist":
        d = Domain(n)
        return cls(d, (Fraction(1, d.size),) * d.size)

    @classmethod
    def point(cls, n: int, x: int) -> "Dist":
        d = Domain(n)
        return cls(d, tuple(ONE if i == x else ZERO for i in range(d.size)))

    @property
    def n(self) -> int:
        return self.domain.bits

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, x):
        return self.probs[x]

    def support(self) -> list[int]:
        return [x for x, p in enumerate(self.probs) if p]


@dataclass(frozen=True)
class Joint:
    """Exact joint table of ``(X, Z)``; ``probs[x][z]``.

    ``z_split=(m1, m2)`` declares ``Z`` as the pair ``(Z1, Z2)``.
    Zero-mass z-columns are rejected unless ``degenerate=True``.
    """

    x_domain: Domain
    z_domain: Domain
    probs: tuple
    z_split: tuple | None = None
    degenerate: bool = False
    _z_marginal: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        rows = tuple(tuple(frac(p) for p in row) for row in self.probs)
        object.__setattr__(self, "probs", rows)
        if len(rows) != self.x_domain.size:
            raise InvalidDistribution(
                f"expected {self.x_domain.size} rows (x values), got {len(rows)}"
            )
        for row in rows:
            if len(row) != self.z_domain.size:
                raise InvalidDistribution(
                    f"expected {self.z_domain.size} columns (z values), got {len(row)}"
                )
            _check_probs(row)
        total = sum(sum(row) for row in rows)
        if total != 1:
            raise InvalidDistribution(f"joint mass is {total}, not 1")
        zm = tuple(sum(rows[x][z] for x in range(len(rows))) for z in range(self.z_domain.size))
        object.__setattr__(self, "_z_marginal", zm)
        if not self.degenerate and any(p == 0 for p in zm):
            raise InvalidDistribution(
                "Z-marginal has a zero-mass column; pass degenerate=True to allow it"
            )
        if self.z_split is not None:
            m1, m2 = self.z_split
            if m1 < 0 or m2 < 0 or m1 + m2 != self.z_domain.bits:
                raise DomainError(f"z_split {self.z_split} does not cover {self.z_domain.bits} bits")
            object.__setattr__(self, "z_split", (int(m1), int(m2)))

    # construction helpers
    @classmethod
    def from_table(cls, table, z_split=None, degenerate=False) -> "Joint":
        table = tuple(tuple(row) for row in table)
        nx = len(table).bit_length() - 1
        nz = len(table[0]).bit_length() - 1
        if 1 << nx != len(table) or 1 << nz != len(table[0]):
            raise DomainError("table dimensions must be powers of two")
        return cls(Domain(nx), Domain(nz), table, z_split=z_split, degenerate=degenerate)

    @classmethod
    def from_dist(cls, d: Dist) -> "Joint":
        """``(X, Z)`` with ``Z`` constant (zero bits)."""
        return cls(d.domain, Domain(0), tuple((p,) for p in d.probs))

    @classmethod
    def from_conditionals(cls, z_marginal: Sequence, conditionals: Sequence, z_split=None,
                          degenerate=False) -> "Joint":
        """Assemble ``P(x, z) = P(z) * P(x | z)`` from per-z distributions."""
        zm = [frac(p) for p in z_marginal]
        nz = len(zm).bit_length() - 1
        nx = conditionals[0].n
        size = 1 << nx
        table = [[ZERO] * len(zm) for _ in range(size)]
        for z, (pz, cond) in enumerate(zip(zm, conditionals)):
            if cond.n != nx:
                raise DomainMismatch("conditionals live on different domains")
            for x in range(size):
                table[x][z] = pz * cond.probs[x]
        return cls(Domain(nx), Domain(nz), table, z_split=z_split, degenerate=degenerate)

    @classmethod
    def product(cls, xd: Dist, zd: Dist, degenerate=False) -> "Joint":
        return cls(
            xd.domain,
            zd.domain,
            tuple(tuple(px * pz for pz in zd.probs) for px in xd.probs),
            degenerate=degenerate,
        )

    # accessors
    @property
    def n(self) -> int:
        return self.x_domain.bits

    @property
    def m(self) -> int:
        return self.z_domain.bits

    @property
    def nx(self) -> int:
        return self.x_domain.size

    @property
    def nz(self) -> int:
        return self.z_domain.size

    def z_marginal(self) -> tuple:
        return self._z_marginal

    def x_marginal(self) -> Dist:
        return Dist(self.x_domain, tuple(sum(row) for row in self.probs))

    def column(self, z: int) -> tuple:
        return tuple(row[z] for row in self.probs)

    def support_z(self) -> list[int]:
        return [z for z, p in enumerate(self._z_marginal) if p]

    def split(self, z: int) -> tuple[int, int]:
        """Unpack a pair index into ``(z1, z2)``."""
        m1, _ = self.z_split
        return z & ((1 << m1) - 1), z >> m1

    def pair(self, z1: int, z2: int) -> int:
        m1, _ = self.z_split
        return z1 | (z2 << m1)

    def marginal_z1(self) -> "Joint":
        """Forget ``Z2``: the joint of ``(X, Z1)``."""
        if self.z_split is None:
            raise DomainError("joint has no declared (Z1, Z2) split")
        m1, m2 = self.z_split
        table = [[ZERO] * (1 << m1) for _ in range(self.nx)]
        for x in range(self.nx):
            for z in range(self.nz):
                z1, _ = self.split(z)
                table[x][z1] += self.probs[x][z]
        return Joint(self.x_domain, Domain(m1), table, degenerate=True)

    def with_x_conditionals(self, conditionals: Sequence) -> "Joint":
        """Same Z-marginal, ``X | Z=z`` replaced by ``conditionals[z]``.

        Entries for zero-mass columns are ignored.
        """
        zm = self._z_marginal
        n = conditionals[next(z for z in range(self.nz) if zm[z])].n
        conds = [c if c is not None else Dist.uniform(n) for c in conditionals]
        return Joint.from_conditionals(zm, conds, z_split=self.z_split,
                                       degenerate=self.degenerate or any(p == 0 for p in zm))


@dataclass(frozen=True)
class EntropyParams:
    """Quality triple: guessing probability, advantage bound, size budget."""

    gamma: Fraction
    epsilon: Fraction = ZERO
    size_budget: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "gamma", frac(self.gamma))
        object.__setattr__(self, "epsilon", frac(self.epsilon))
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.size_budget is not None and self.size_budget < 0:
            raise ValueError("size budget must be nonnegative")

    @classmethod
    def from_k(cls, k: int, epsilon=ZERO, size_budget=None) -> "EntropyParams":
        return cls(Fraction(1, 1 << k) if k >= 0 else Fraction(1 << -k), epsilon, size_budget)

    @property
    def display_k(self) -> float:
        return bits(self.gamma)

    def to_json(self) -> dict:
        out = {"gamma": str(self.gamma), "epsilon": str(self.epsilon), "k": self.display_k}
        if self.size_budget is not None:
            out["size"] = self.size_budget
        return out


# ---------------------------------------------------------------------------
# operations


def guess_prob(d: Dist) -> Fraction:
    return max(d.probs)


def cond_guess_prob_avg(j: Joint) -> Fraction:
    """``sum_z max_x P(x, z)``, i.e. ``E_z max_x P(x | z)``."""
    return sum((max(j.column(z)) for z in range(j.nz)), ZERO)


def cond_guess_prob_worst(j: Joint) -> Fraction:
    zm = j.z_marginal()
    best = None
    for z in range(j.nz):
        if zm[z] == 0:
            continue
        g = max(j.column(z)) / zm[z]
        if best is None or g > best:
            best = g
    if best is None:
        raise ZeroMassCondition("joint has empty Z-support")
    return best


def condition(j: Joint, z: int) -> Dist:
    pz = j.z_marginal()[z]
    if pz == 0:
        raise ZeroMassCondition(f"P(Z={z}) = 0")
    return Dist(j.x_domain, tuple(p / pz for p in j.column(z)))


def conditionals(j: Joint) -> list:
    """``X | Z=z`` for every z, ``None`` for zero-mass columns."""
    zm = j.z_marginal()
    return [condition(j, z) if zm[z] else None for z in range(j.nz)]


def statistical_distance(p: Dist, q: Dist) -> Fraction:
    if p.domain != q.domain:
        raise DomainMismatch(f"domains {p.n} and {q.n} bits differ")
    return sum((abs(a - b) for a, b in zip(p.probs, q.probs)), ZERO) / 2


class AvgWorstSplit(NamedTuple):
    gamma: Fraction
    good_z: frozenset
    good_mass: Fraction


def avg_to_worst_split(j: Joint, delta) -> AvgWorstSplit:
    """Markov split of average min-entropy into a worst-case guarantee.

    Returns ``gamma' = avg_guess / delta`` and the set of z whose conditional
    guessing probability is at most ``gamma'``; that set carries mass at
    least ``1 - delta``.
    """
    delta = frac(delta)
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    gamma = cond_guess_prob_avg(j) / delta
    zm = j.z_marginal()
    good = frozenset(z for z in range(j.nz) if zm[z] and max(j.column(z)) <= gamma * zm[z])
    return AvgWorstSplit(gamma, good, sum((zm[z] for z in good), ZERO))


class ChainRuleCheck(NamedTuple):
    holds: bool
    guess_z1z2: Fraction
    guess_z1: Fraction
    m2: int


def it_chain_rule_check(j3: Joint) -> ChainRuleCheck:
    """Information-theoretic leakage chain rule on an exact joint.

    Checks ``avg_guess(X | Z1, Z2) <= 2**m2 * avg_guess(X | Z1)``.
    """
    if j3.z_split is None:
        raise DomainError("it_chain_rule_check needs a joint with a (Z1, Z2) split")
    m2 = j3.z_split[1]
    lhs = cond_guess_prob_avg(j3)
    rhs = cond_guess_prob_avg(j3.marginal_z1())
    return ChainRuleCheck(lhs <= (1 << m2) * rhs, lhs, rhs, m2)
