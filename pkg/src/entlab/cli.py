"""Command-line surface.

Subcommands print JSON on stdout (``--pretty`` prints text tables instead).
Exit codes: 0 for success, 1 when a check fails (a suite violation or a
certificate that does not hold), 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import circuit as circ
from . import reductions as red
from .boost import metric_to_hill_boost
from .dist import bits
from .engine import NOTIONS, decomposable_check, evaluate, modulus_fit
from .errors import EntlabError, InfeasibleWitness, NoThreshold
from .ledger import ASSUMPTIONS, conversion_ledger
from .scenario import (
    artifact_json, dist_from_json, dumps, load_scenario, to_jsonable, verdict_json,
)
from .distinguisher import Distinguisher
from .suites import SEARCH_TARGETS, SUITES, TOY_F, run_suite, search_separation

REDUCTIONS = ("leakage", "chain-rule", "avg-to-worst", "decomposable", "core-lemma",
              "truncation", "sampler", "approx-count", "real-to-boolean", "metric-to-hill",
              "tightness", "ledger")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# text output


def _cell(v) -> str:
    v = to_jsonable(v)
    if isinstance(v, (dict, list)):
        text = json.dumps(v, sort_keys=True)
        return text if len(text) <= 60 else text[:57] + "..."
    return str(v)


def table(rows, headers=("key", "value")) -> str:
    rows = [[_cell(c) for c in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    line = "  ".join("-" * w for w in widths)
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)), line]
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(out)


def _pretty_mapping(title: str, obj: dict) -> str:
    skip = ("certificates", "certificate", "witness", "transcript")
    flat = [(k, v) for k, v in obj.items() if k not in skip]
    return f"{title}\n{table(flat)}"


def _emit(obj: dict, pretty: bool, title: str, extra: str = "") -> None:
    if pretty:
        text = _pretty_mapping(title, obj)
        if "certificate" in obj:
            text += "\n\ncertificate\n" + table(list(to_jsonable(obj["certificate"]).items()))
        print(text + (("\n\n" + extra) if extra else ""))
    else:
        print(dumps(obj))


# ---------------------------------------------------------------------------
# subcommands


def _member(sc, index):
    if not sc.cls:
        raise UsageError("the scenario needs a class with at least one member")
    if not 0 <= index < len(sc.cls):
        raise UsageError(f"member index {index} out of range (class has {len(sc.cls)})")
    return sc.cls[index]


def _params(sc):
    if sc.params is None:
        raise UsageError("the scenario needs params (gamma or k)")
    return sc.params


def cmd_compute(args) -> int:
    sc = load_scenario(args.scenario)
    params = _params(sc)
    verdict = evaluate(args.notion, sc.joint, sc.cls, params, with_witness=args.with_witness)
    out = verdict_json(verdict)
    if args.notion == "min":
        out["k"] = to_jsonable(_bits(verdict.value))
    _emit(out, args.pretty, f"{args.notion}: {'holds' if verdict.holds else 'fails'}")
    return EXIT_OK


def _bits(g: Fraction):
    """``-log2 g``, exact when ``g`` is a power of two."""
    if g.numerator == 1 and g.denominator & (g.denominator - 1) == 0:
        return g.denominator.bit_length() - 1
    return bits(g)


def _sampler(sc, spec):
    if spec in (None, "uniform"):
        return red.Sampler.uniform(sc.n, sc.m)
    if isinstance(spec, list):
        return red.Sampler(tuple(dist_from_json(c) for c in spec))
    raise UsageError("options.sampler must be \"uniform\" or a list of per-z distributions")


def _reduce(name, sc, opts) -> dict:
    member = int(opts.get("member", 0))
    if name == "leakage":
        if "x_test" not in opts or "y" not in opts:
            raise UsageError("leakage needs options.x_test (values on x) and options.y")
        d = Distinguisher.from_x_function([Fraction(v) for v in opts["x_test"]])
        y = dist_from_json(opts["y"])
        return artifact_json(red.leakage_witness(d, sc.joint, y, opts.get("gamma")))
    if name == "chain-rule":
        arts = red.modulus_chain_rule(sc.joint, sc.cls, _params(sc))
        return {"kind": "chain-rule", "ok": all(a.ok for a in arts),
                "members": [artifact_json(a) for a in arts]}
    if name == "avg-to-worst":
        delta = Fraction(opts.get("delta", "1/4"))
        return artifact_json(red.avg_to_worst_modulus(sc.joint, sc.cls, _params(sc), delta))
    if name == "decomposable":
        verdict = decomposable_check(sc.joint, sc.cls, _params(sc))
        caps = verdict.witness.caps
        witnesses = [to_jsonable(red.decomposable_witness(d, sc.joint, caps)) for d in sc.cls]
        return {"kind": "decomposable", "ok": verdict.holds, "verdict": verdict_json(verdict),
                "witnesses": witnesses}
    d = _member(sc, member)
    params = _params(sc)
    gamma = params.gamma
    eps = params.epsilon or None
    if name == "core-lemma":
        if eps is None:
            eps = modulus_fit(d, sc.joint, gamma, "worst").value
        return artifact_json(red.core_lemma_event(d, sc.joint, gamma, eps))
    if name == "truncation":
        return artifact_json(red.metric_from_modulus(d, sc.joint, gamma, int(opts.get("t", 0))))
    if name == "sampler":
        if eps is None:
            raise UsageError("sampler needs params.epsilon (the violation level)")
        art = red.sampler_distinguisher(d, _sampler(sc, opts.get("sampler")), eps, sc.joint,
                                        gamma=gamma)
        out = artifact_json(art)
        out.pop("distinguisher", None)
        return out
    if name == "approx-count":
        if eps is None:
            raise UsageError("approx-count needs params.epsilon (eps')")
        art = red.approx_count_distinguisher(
            d, sc.joint, gamma, eps, opts.get("mode", "exact-oracle"), ell=opts.get("ell"),
            oracle_gamma=Fraction(opts.get("oracle_gamma", "1/4")), copies=opts.get("copies"))
        return artifact_json(art)
    if name == "real-to-boolean":
        return artifact_json(red.real_to_boolean(d, sc.joint, gamma, eps))
    if name == "metric-to-hill":
        res = metric_to_hill_boost(sc.joint, sc.cls, params, Fraction(opts.get("delta", "1/8")))
        out = {"kind": "metric-to-hill", "ok": True, "outcome": res.outcome,
               "game_value": res.game_value, "rounds_bound": res.rounds_bound}
        if res.outcome == "witness":
            out["witness"] = to_jsonable(res.witness)
        else:
            out["ok"] = res.combo_advantage >= params.epsilon
            out.update({"combo_advantage": res.combo_advantage, "length": res.length,
                        "weights": [str(w) for w in res.weights]})
        return to_jsonable(out)
    raise UsageError(f"unknown reduction {name!r}")


def cmd_reduce(args) -> int:
    if args.reduction == "tightness":
        obj = json.loads(Path(args.scenario).read_text()) if args.scenario else {}
        sources = obj.get("f", list(TOY_F))
        inputs = int(obj.get("inputs", 2))
        f = [circ.parse(s, inputs, 0) for s in sources]
        out = artifact_json(red.tightness_demo(f))
    elif args.reduction == "ledger":
        rows = [conversion_ledger(a).to_json() for a in ASSUMPTIONS]
        out = {"kind": "ledger", "ok": True, "rows": rows}
        if args.pretty:
            print(table([(r["assumption"], r["k"], r["eps"], r["s"],
                          ",".join(f"{k}={v}" for k, v in r["provenance"].items())) for r in rows],
                        ("assumption", "k'", "eps'", "s'", "provenance")))
            return EXIT_OK
    else:
        if not args.scenario:
            raise UsageError("--scenario is required for this reduction")
        sc = load_scenario(args.scenario)
        out = _reduce(args.reduction, sc, sc.options)
    _emit(out, args.pretty, f"{args.reduction}: {'ok' if out.get('ok') else 'FAILED'}")
    return EXIT_OK if out.get("ok") else EXIT_FAIL


def cmd_verify(args) -> int:
    options = {}
    if args.monte_carlo:
        if args.suite != "SAMP-MOD":
            raise UsageError("--monte-carlo only applies to SAMP-MOD")
        options["monte_carlo"] = args.monte_carlo
    report = run_suite(args.suite, args.trials, args.seed, args.threads, **options)
    if args.pretty:
        rows = [(r.index, "ok" if r.ok else "FAIL", ",".join(r.failed)) for r in report.results
                if not r.ok]
        print(f"{report.suite}: {'PASS' if report.passed else 'FAIL'} "
              f"({len(report.results)} instances, seed {report.seed}, "
              f"{len(report.violations)} violations)")
        if rows:
            print(table(rows, ("index", "status", "failed checks")))
        if args.timing:
            print(f"wall clock: {report.wall_clock:.2f} s")
    else:
        print(report.dumps(args.timing))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_search(args) -> int:
    res = search_separation(args.target, args.budget, args.seed, args.n, args.m)
    out = res.to_json()
    if args.pretty:
        print(f"{args.target}: {'found gap ' + str(res.best_gap) if res.found else 'no separation found'}"
              f" after {res.evaluated} evaluations")
        if res.found:
            print(table([(k, v) for k, v in res.witness.items()]))
    else:
        print(dumps(out))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate one entropy notion on a scenario")
    # squared indistinguishability compares two joints, so it has no single-scenario form
    c.add_argument("--notion", required=True, choices=[n for n in NOTIONS if n != "squared"])
    c.add_argument("--scenario", required=True)
    c.add_argument("--with-witness", action="store_true")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=sorted(SUITES))
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: ENTLAB_THREADS or 1)")
    v.add_argument("--monte-carlo", type=int, default=0,
                   help="SAMP-MOD only: simulate the first N instances")
    v.add_argument("--timing", action="store_true", help="include wall-clock time")

    r = sub.add_parser("reduce", help="run one constructive reduction")
    r.add_argument("--reduction", required=True, choices=REDUCTIONS)
    r.add_argument("--scenario")

    s = sub.add_parser("search", help="look for a separation between two notions")
    s.add_argument("--target", required=True, choices=SEARCH_TARGETS)
    s.add_argument("--budget", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--m", type=int, default=1)

    for sp_ in (c, v, r, s):
        sp_.add_argument("--pretty", action="store_true", help="text tables instead of JSON")
    return p


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "reduce": cmd_reduce, "search": cmd_search}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (NoThreshold, InfeasibleWitness) as exc:  # a construction that should exist failed
        print(f"entlab: construction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, EntlabError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"entlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
