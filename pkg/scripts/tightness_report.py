"""Advantage of the equality test ``[f(u) = y]`` against capped Y.

Runs the toy map and a batch of random injective maps, and sweeps the
average cap to show where the advantage floor sits.
"""

import argparse
from fractions import Fraction

from entlab import circuit as circ
from entlab import reductions as red
from entlab.generate import instance_rng, random_injective
from entlab.suites import TOY_F


def row(label, f, cap):
    c = red.tightness_demo(f, avg_cap=cap).certificate
    return (f"{label:28s} cap={str(cap):5s} min_adv={str(c['min_advantage']):7s} "
            f"good_mass={str(c['good_mass']):5s} good_gap={str(c['good_gap']):6s} "
            f"guaranteed={str(c['guaranteed']):6s} adv>=1/12={c['advantage_ok']}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--random", type=int, default=5, help="random injective maps")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    toy = [circ.parse(s, 2, 0) for s in TOY_F]
    for cap in (Fraction(1, 16), Fraction(1, 8), Fraction(3, 16), Fraction(1, 4)):
        print(row("toy " + ",".join(TOY_F), toy, cap))
    for i in range(args.random):
        f = random_injective(instance_rng("tightness-report", args.seed, i))
        print(row(",".join(circ.to_text(g) for g in f)[:28], f, Fraction(1, 8)))


if __name__ == "__main__":
    main()
