"""RK4 step-halving study on the square pi pulse.

Reports the final-state deviation between h and h/2 for several step sizes
and the ratio between successive deviations (16 for a fourth-order method).
"""
import math

from pulsecal.calibration import Scheme
from pulsecal.dynamics import IntegratorConfig, propagate, verify_step
from pulsecal.gates import build_y_gate
from pulsecal.model import Shape


def main(amp_fraction=0.1):
    sched = build_y_gate(math.pi, Shape.SQUARE, Scheme.RWA, amp_fraction)
    prev = None
    for n in (100, 200, 400, 800, 1000, 1600):
        cfg = IntegratorConfig(h=2 * math.pi / n)
        dev = verify_step(sched, cfg=cfg)
        norm = propagate(sched, cfg=cfg).final_bloch.norm
        ratio = f"{prev / dev:6.2f}" if prev else "     -"
        print(f"steps/period {n:5d}  deviation {dev:.3e}  ratio {ratio}  |1 - norm| {abs(1 - norm):.2e}")
        prev = dev


if __name__ == "__main__":
    main()
