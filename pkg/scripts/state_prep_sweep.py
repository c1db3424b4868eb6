"""theta sweep of the Y_{pi/2} Z_{pi-theta} Y_{pi/2} sequence with per-angle shift optimisation.

    python scripts/state_prep_sweep.py --points 33 --shapes square,gaussian
"""
import argparse
from dataclasses import replace

from pulsecal.cli import RunConfig, parse_shapes, run_sweep
from pulsecal.gates import theta_grid


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=33)
    ap.add_argument("--shapes", default="square,gaussian")
    ap.add_argument("--amp-fractions", default="0.2")
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    cfg = replace(RunConfig(), amp_fractions=tuple(float(a) for a in args.amp_fractions.split(",")))
    paths = run_sweep(theta_grid(args.points), parse_shapes(args.shapes), cfg, args.out)
    print("\n".join(map(str, paths)))


if __name__ == "__main__":
    main()
