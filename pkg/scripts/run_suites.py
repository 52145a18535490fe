"""Run every verification suite at its acceptance size and print a summary.

    python3 scripts/run_suites.py --seed 2026 --scale 0.1 --out reports/
"""

import argparse
import time
from pathlib import Path

from entlab.suites import SUITES, run_allocator_check, run_suite

SIZES = {
    "IT-CHAIN": 1000, "AVG-WORST": 500, "MOD-CHAIN": 200, "DEC-MOD": 200, "MET-MOD": 100,
    "SAMP-MOD": 50, "SQ-MOD": 500, "COUNT-MOD": 20, "REAL-BOOL": 200, "MET-HILL": 50,
    "TIGHT": 10, "CORE": 100, "LEAK": 100, "LEDGER": 20,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=2026)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply every trial count")
    ap.add_argument("--suites", nargs="*", default=sorted(SUITES))
    ap.add_argument("--monte-carlo", type=int, default=6, help="SAMP-MOD simulated instances")
    ap.add_argument("--out", type=Path, help="directory for one JSON report per suite")
    args = ap.parse_args()

    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for name in args.suites:
        trials = max(1, round(SIZES[name] * args.scale))
        opts = {"monte_carlo": min(args.monte_carlo, trials)} if name == "SAMP-MOD" else {}
        start = time.perf_counter()
        report = run_suite(name, trials, args.seed, **opts)
        took = time.perf_counter() - start
        failed += not report.passed
        print(f"{name:10s} {'PASS' if report.passed else 'FAIL'}  {trials:5d} instances  "
              f"{len(report.violations):3d} violations  {took:7.1f} s", flush=True)
        if args.out:
            (args.out / f"{name}.json").write_text(report.dumps())
    oracle = run_allocator_check(max(1, round(500 * args.scale)), args.seed)
    failed += not oracle.passed
    print(f"{'ORACLE':10s} {'PASS' if oracle.passed else 'FAIL'}  {len(oracle.results):5d} instances")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
