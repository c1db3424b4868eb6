"""Trajectory dumps for the square pi (fig1) and pi/2 (fig2) pulses at amp fraction 0.1."""
import csv
import sys

from pulsecal.cli import RunConfig, run_figure


def main(out="results"):
    for fig in ("fig1", "fig2"):
        path = run_figure(fig, RunConfig(), out)
        with open(path) as fh:
            last = list(csv.DictReader(fh))[-1]
        print(f"{fig}: {path}  t_end={float(last['t']):.2f}  r_z={float(last['r_z']):+.6f}  c_xy={float(last['c_xy']):.6f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
