"""Cached simulations shared by the module and acceptance tests."""
import math
from functools import lru_cache

from pulsecal import gates
from pulsecal.calibration import Scheme
from pulsecal.model import Shape

ANGLES = {"pi": math.pi, "pi_half": math.pi / 2}


@lru_cache(maxsize=None)
def gate(angle: str, shape: Shape, scheme: Scheme, amp: float, c_eff: float | None = None):
    """Gate result; tunable schemes are optimised unless ``c_eff`` is given."""
    a = ANGLES[angle]
    if scheme.tunable and c_eff is None:
        return gates.optimize_y_gate(a, shape, scheme, amp)
    return gates.run_y_gate(a, shape, scheme, amp, c_eff)


def error(angle, shape, scheme, amp) -> float:
    return gate(angle, shape, scheme, amp).error


@lru_cache(maxsize=None)
def prep_profile(shape: Shape, amp: float, n: int = 33):
    return gates.c_eff_profile(gates.theta_grid(n), shape, amp)
