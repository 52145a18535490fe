"""Parameter bookkeeping for conversions into modulus entropy.

Each assumption maps an input triple ``(k, eps, s)`` to the triple under
which modulus entropy is guaranteed.  Formulas are kept symbolic (sympy);
hidden constants are made explicit and every row carries a provenance flag:

* ``exact``: the formula is proved with exactly these constants;
* ``constant``: an unspecified constant has been fixed (``c``) by us;
* ``symbolic``: the quantity is only known up to an unspecified function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from .dist import EntropyParams, frac

k, eps, s, n, m, t, delta = sp.symbols("k epsilon s n m t delta", positive=True)
size_gamma = sp.Symbol("size_Gamma", nonnegative=True)
c = sp.Symbol("c", positive=True)
poly = sp.Function("poly")

ASSUMPTIONS = ("decomposable", "samplable", "np-oracle", "high-entropy", "none", "squared")
TRUNCATION_C = 2  # gates per kept z-value per z-bit in the truncation


def log2(x):
    return sp.log(x, 2)


@dataclass
class LedgerRow:
    """One conversion.  ``k``, ``eps`` and ``s`` are sympy expressions."""

    assumption: str
    k: sp.Expr
    eps: sp.Expr
    s: sp.Expr
    provenance: dict
    constants: dict = field(default_factory=dict)
    variants: dict = field(default_factory=dict)

    def evaluate(self, **values) -> dict:
        """Substitute numbers (by symbol name) into the three formulas."""
        subs = {sp.Symbol(name, positive=True): v for name, v in values.items()}
        subs.update({sp.Symbol(name, nonnegative=True): v for name, v in values.items()})
        subs.update({sp.Symbol(name): v for name, v in values.items()})
        subs.update(self.constants)
        return {key: sp.nsimplify(sp.simplify(expr.subs(subs))) if expr.free_symbols else expr
                for key, expr in (("k", self.k), ("eps", self.eps), ("s", self.s))}

    def to_json(self) -> dict:
        return {
            "assumption": self.assumption,
            "k": str(self.k),
            "eps": str(self.eps),
            "s": str(self.s),
            "provenance": dict(self.provenance),
            "constants": {str(a): str(b) for a, b in self.constants.items()},
            "variants": {name: {key: str(v) for key, v in row.items()}
                         for name, row in self.variants.items()},
        }


def conversion_ledger(assumption: str) -> LedgerRow:
    """Symbolic ``(k', eps', s')`` for one assumption on metric entropy."""
    if assumption == "decomposable":
        return LedgerRow(assumption, k, eps, s,
                         {"k": "exact", "eps": "exact", "s": "exact"})
    if assumption == "samplable":
        # the sampler test uses ell = ceil(64/eps'^2) - 1 samples and needs
        # ell * 2^(k'-k) <= 1/2, with eps' = 8 sqrt(eps) the modulus level
        stated = {"k": k - 2 * log2(1 / eps) - 7, "eps": 8 * sp.sqrt(eps),
                  "s": s * eps ** 2 / 64 - size_gamma}
        eps_prime = 8 * sp.sqrt(eps)
        ell_plus_one = 64 / eps_prime ** 2  # = 1/eps, ignoring the ceiling
        proof = {"k": k - 2 * log2(1 / eps_prime) - 7, "eps": eps_prime,
                 "s": s / ell_plus_one - size_gamma}
        return LedgerRow(assumption, stated["k"], stated["eps"], stated["s"],
                         {"k": "exact", "eps": "exact", "s": "exact"},
                         variants={"statement": stated, "proof": {
                             key: sp.simplify(v) for key, v in proof.items()}})
    if assumption == "np-oracle":
        return LedgerRow(assumption, k - log2(1 / eps), 8 * sp.sqrt(eps), poly(n, 1 / eps),
                         {"k": "exact", "eps": "exact", "s": "symbolic"})
    if assumption == "high-entropy":
        # the summary table quotes a different size loss than the theorem
        table = {"k": k - log2(1 / eps), "eps": 8 * sp.sqrt(eps),
                 "s": c * s * eps ** 3 / ((m + n) * log2(1 / eps))}
        return LedgerRow(assumption, k - log2(1 / eps), 8 * sp.sqrt(eps),
                         c * s * 2 ** (k - n - 2) * eps / log2(1 / eps),
                         {"k": "exact", "eps": "exact", "s": "constant"}, {c: 1},
                         variants={"table": table})
    if assumption == "none":
        return LedgerRow(assumption, k, 2 ** t * eps, s - c * 2 ** (m - t) * m,
                         {"k": "exact", "eps": "exact", "s": "constant"}, {c: TRUNCATION_C})
    if assumption == "squared":
        return LedgerRow(assumption, k, sp.sqrt(eps), s,
                         {"k": "exact", "eps": "exact", "s": "exact"})
    raise ValueError(f"unknown assumption {assumption!r}; expected one of {ASSUMPTIONS}")


def full_ledger() -> list:
    return [conversion_ledger(a) for a in ASSUMPTIONS]


def modulus_to_hill_params(params: EntropyParams, n_bits: int, m_bits: int, delta_value,
                           c_value=1) -> EntropyParams:
    """Modulus entropy at ``(gamma, eps, s)`` to HILL entropy at
    ``(gamma / delta, eps + 2 delta, s c delta^2 / (n + m))``.

    ``c`` stands for the unspecified constant of the size loss (flagged
    ``constant`` in reports).
    """
    d = frac(delta_value)
    if d <= 0:
        raise ValueError("delta must be positive")
    gamma = params.gamma / d
    if gamma > 1:
        raise ValueError(f"delta {d} is smaller than gamma; no entropy left")
    eps2 = params.epsilon + 2 * d
    if eps2 > 1:
        raise ValueError(f"eps + 2 delta = {eps2} exceeds 1")
    size = None
    if params.size_budget is not None:
        size = int(params.size_budget * frac(c_value) * d * d / (n_bits + m_bits))
    return EntropyParams(gamma, eps2, size)


def hill_params_symbolic() -> dict:
    """The same conversion in symbols (k measured in bits)."""
    return {"k": k - log2(1 / delta), "eps": eps + 2 * delta, "s": c * s * delta ** 2 / (n + m)}
