"""Scenario files and JSON conversion.

A scenario is a JSON object::

    {
      "n": 2, "m": 1,                      # or "m1"/"m2" for a split Z
      "joint": [["1/8", "1/8"], ...],      # probs[x][z], rationals as strings
      "class": {"kind": "dsl", "circuits": ["and(x0, z0)"], "complement": true},
      "params": {"gamma": "1/2", "epsilon": "1/16", "size": 40},
      "options": {"seed": 3, "trials": 10}
    }

Class kinds: ``dsl`` (circuit strings), ``table`` (flat x-major value lists),
``enumerate`` (all circuits up to ``max_size`` gates).  ``params`` may give
``k`` instead of ``gamma``.  Rationals are written as ``"p/q"`` strings so
that round trips are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import circuit as circ
from .dist import Dist, EntropyParams, Joint
from .distinguisher import Distinguisher, complement_closure
from .errors import EntlabError, ScenarioError

MAX_DIGITS = 60  # longer rationals are abbreviated in reports


@dataclass
class Scenario:
    joint: Joint
    cls: list = field(default_factory=list)
    params: EntropyParams | None = None
    options: dict = field(default_factory=dict)
    class_spec: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.joint.n

    @property
    def m(self) -> int:
        return self.joint.m

    def to_json(self) -> dict:
        out = {"n": self.n}
        if self.joint.z_split is not None:
            out["m1"], out["m2"] = self.joint.z_split
        else:
            out["m"] = self.m
        out["joint"] = [[str(p) for p in row] for row in self.joint.probs]
        if self.class_spec:
            out["class"] = self.class_spec
        if self.params is not None:
            p = {"gamma": str(self.params.gamma), "epsilon": str(self.params.epsilon)}
            if self.params.size_budget is not None:
                p["size"] = self.params.size_budget
            out["params"] = p
        if self.options:
            out["options"] = to_jsonable(self.options)
        return out


# ---------------------------------------------------------------------------
# parsing


def _rational(v, what):
    try:
        if isinstance(v, float):
            raise ScenarioError(f"{what}: write rationals as \"p/q\" strings, not floats")
        return Fraction(v)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ScenarioError(f"{what}: cannot read {v!r} as a rational") from exc


def _int(obj, key, default=None):
    v = obj.get(key, default)
    if v is None:
        raise ScenarioError(f"missing field {key!r}")
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise ScenarioError(f"{key!r} must be a nonnegative integer")
    return v


def parse_params(obj: dict | None) -> EntropyParams | None:
    if obj is None:
        return None
    if not isinstance(obj, dict):
        raise ScenarioError("params must be an object")
    try:
        if "gamma" in obj:
            gamma = _rational(obj["gamma"], "params.gamma")
        elif "k" in obj:
            gamma = Fraction(1, 2 ** int(obj["k"]))
        else:
            raise ScenarioError("params need gamma or k")
        return EntropyParams(gamma, _rational(obj.get("epsilon", 0), "params.epsilon"),
                             obj.get("size"))
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def parse_class(spec: dict | None, n: int, m: int) -> list:
    if spec is None:
        return []
    if not isinstance(spec, dict):
        raise ScenarioError("class must be an object")
    kind = spec.get("kind")
    try:
        if kind == "dsl":
            members = [Distinguisher.from_circuit(circ.parse(s, n, m), n, m)
                       for s in spec.get("circuits", [])]
        elif kind == "table":
            members = [Distinguisher.from_flat(n, m, [_rational(v, "class.tables") for v in row])
                       for row in spec.get("tables", [])]
        elif kind == "enumerate":
            cs = circ.CircuitClassSpec("enumerate", n=n, m=m,
                                       gates=tuple(spec.get("gates", circ.DEFAULT_GATES)),
                                       max_size=int(spec.get("max_size", 1)))
            members = [Distinguisher.from_circuit(c, n, m) for c in circ.enumerate_class(cs)]
        else:
            raise ScenarioError(f"unknown class kind {kind!r}; use dsl, table or enumerate")
    except EntlabError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"class: {exc}") from exc
    except ValueError as exc:
        raise ScenarioError(f"class: {exc}") from exc
    if spec.get("complement"):
        members = complement_closure(members)
    return members


def parse_scenario(obj: dict) -> Scenario:
    if not isinstance(obj, dict):
        raise ScenarioError("a scenario is a JSON object")
    n = _int(obj, "n")
    if "m1" in obj or "m2" in obj:
        split = (_int(obj, "m1"), _int(obj, "m2"))
        m = sum(split)
    else:
        split = None
        m = _int(obj, "m", 0)
    table = obj.get("joint")
    if table is None and "x" in obj:  # a bare distribution of X
        table = [[p] for p in obj["x"]]
    if not isinstance(table, list):
        raise ScenarioError("missing joint table")
    rows = [[_rational(p, "joint") for p in row] for row in table]
    try:
        j = Joint.from_table(rows, z_split=split, degenerate=bool(obj.get("degenerate")))
    except (EntlabError, ValueError, IndexError) as exc:
        raise ScenarioError(f"joint: {exc}") from exc
    if (j.n, j.m) != (n, m):
        raise ScenarioError(f"joint table is {j.nx}x{j.nz}, expected 2^{n} x 2^{m}")
    spec = obj.get("class") or {}
    return Scenario(j, parse_class(obj.get("class"), n, m), parse_params(obj.get("params")),
                    dict(obj.get("options", {})), spec)


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: malformed JSON ({exc})") from exc
    return parse_scenario(obj)


def dist_from_json(values) -> Dist:
    return Dist.from_probs([_rational(v, "distribution") for v in values])


# ---------------------------------------------------------------------------
# serialization


def fraction_text(q: Fraction) -> str:
    text = str(q)
    if len(text) <= MAX_DIGITS:
        return text
    return f"~{float(q):.12g} ({len(str(q.numerator))}/{len(str(q.denominator))} digits)"


def to_jsonable(obj):
    """Recursively turn results into plain JSON values (rationals as text)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return fraction_text(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if isinstance(obj, Joint):
        return {"n": obj.n, "m": obj.m, "joint": [[fraction_text(p) for p in row] for row in obj.probs]}
    if isinstance(obj, Dist):
        return [fraction_text(p) for p in obj.probs]
    if isinstance(obj, Distinguisher):
        return distinguisher_json(obj)
    if isinstance(obj, EntropyParams):
        return obj.to_json()
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if hasattr(obj, "numerator") and hasattr(obj, "denominator"):  # mpq
        return fraction_text(Fraction(int(obj.numerator), int(obj.denominator)))
    return str(obj)


def _provenance_text(p) -> str:
    if isinstance(p, tuple):
        return "(" + ", ".join(_provenance_text(v) for v in p) + ")"
    return str(p)


def distinguisher_json(d: Distinguisher, with_values: bool = True) -> dict:
    out = {"n": d.n, "m": d.m, "kind": d.kind, "size": d.size,
           "provenance": _provenance_text(d.provenance)}
    if with_values and (d.n + d.m) <= 8:
        out["values"] = [fraction_text(v) for v in d.flat()]
    return out


def verdict_json(v) -> dict:
    out = {"notion": v.notion, "params": v.params.to_json(), "holds": v.holds,
           "value": to_jsonable(v.value)}
    if v.worst_index is not None:
        out["worst_index"] = v.worst_index
    if v.witness is not None:
        out["witness"] = to_jsonable(v.witness)
    if v.details:
        out["details"] = to_jsonable(v.details)
    return out


def artifact_json(a) -> dict:
    out = {"kind": a.kind, "ok": a.ok, "certificate": to_jsonable(a.certificate)}
    if a.failed_checks():
        out["failed"] = a.failed_checks()
    if a.distinguisher is not None:
        out["distinguisher"] = distinguisher_json(a.distinguisher)
    if a.witness is not None:
        out["witness"] = to_jsonable(a.witness)
    if a.transcript:
        out["transcript"] = to_jsonable(a.transcript)
    return out


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)
