"""Stroboscopic comparison of the zeroth and first-order effective Hamiltonians.

Prints residuals against the time-ordered propagator for each reading of the
stroboscopic interval, and the amplitude-doubling ratio of the first-order residual.
"""
import argparse

from pulsecal.effective import Order, stroboscopic_residuals, tau_survey
from pulsecal.model import default_qubit


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--amp-fraction", type=float, default=0.1)
    ap.add_argument("--periods", type=int, default=100)
    args = ap.parse_args()
    Om = default_qubit(args.amp_fraction).Omega_d

    print(f"Omega_d = {Om:.6g}, N = {args.periods}")
    for tau, res in tau_survey(Om, args.periods).items():
        r0, r1 = res[Order.RWA0], res[Order.RWA1]
        print(f"  tau={tau:12s} RWA0 {r0:.3e}  RWA1 {r1:.3e}  ratio {r0 / r1:8.1f}")

    a = stroboscopic_residuals(Om, n_periods=args.periods)[Order.RWA1]
    b = stroboscopic_residuals(2 * Om, n_periods=args.periods)[Order.RWA1]
    print(f"RWA1 residual growth under amplitude doubling: {b / a:.2f}")


if __name__ == "__main__":
    main()
