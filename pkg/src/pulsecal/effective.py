"""RWA and RWA+ effective Hamiltonians, checked against the time-ordered propagator.

Coefficients ``(h_x, h_y, h_z)`` multiply ``sigma_i / 2``. The first-order
(Bloch-Siegert) correction appears as an extra detuning on ``sigma_z``: the
second-order Magnus term is built from ``[sigma_x, sigma_y] = 2i sigma_z``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.linalg import expm

from .model import SIGMA_X, SIGMA_Y, SIGMA_Z


class Order(enum.Enum):
    RWA0 = 0
    RWA1 = 1


@dataclass(frozen=True)
class EffectiveParams:
    delta: float
    drive: float
    omega_lo: float = 1.0
    order: Order = Order.RWA1


def h_eff(p: EffectiveParams) -> tuple[float, float, float]:
    h_x = 0.0
    h_y = p.drive
    h_z = -p.delta
    if p.order is Order.RWA1:
        h_z -= 3 * p.drive**2 / (4 * p.omega_lo)
        h_y -= p.drive * p.delta / (2 * p.omega_lo)
    return h_x, h_y, h_z


def h_eff_matrix(p: EffectiveParams) -> np.ndarray:
    h_x, h_y, h_z = h_eff(p)
    return 0.5 * (h_x * SIGMA_X + h_y * SIGMA_Y + h_z * SIGMA_Z)


def shifted_resonance(Omega_d: float, d: float = 1.0) -> float:
    """Bloch-Siegert shifted resonance in units of omega_q."""
    return 1 + 0.75 * (Omega_d * d) ** 2


def corrected_rabi(Omega_d: float, d: float, delta: float, omega_lo: float) -> float:
    return Omega_d * d * (1 - delta / (2 * omega_lo))


@numba.njit(cache=True)
def _rotating_propagator(drive, delta, w, total, n):
    """RK4 on U for the rotating-frame Hamiltonian with constant envelope."""
    h = total / n
    u00 = 1.0 + 0j
    u01 = 0j
    u10 = 0j
    u11 = 1.0 + 0j
    hz = -0.5 * delta
    for k in range(n):
        t = k * h
        # H = hz sz + (a - i b) |0><1| + (a + i b) |1><0|, a = drive sin(2wt)/2, b = drive(1 - cos 2wt)/2
        a1 = 0.5 * drive * math.sin(2 * w * t)
        b1 = 0.5 * drive * (1 - math.cos(2 * w * t))
        am = 0.5 * drive * math.sin(2 * w * (t + 0.5 * h))
        bm = 0.5 * drive * (1 - math.cos(2 * w * (t + 0.5 * h)))
        a2 = 0.5 * drive * math.sin(2 * w * (t + h))
        b2 = 0.5 * drive * (1 - math.cos(2 * w * (t + h)))
        # columns evolve independently: apply to (u00, u10) and (u01, u11)
        for col in range(2):
            if col == 0:
                x0 = u00
                x1 = u10
            else:
                x0 = u01
                x1 = u11
            o01 = a1 - 1j * b1
            o10 = a1 + 1j * b1
            k10 = -1j * (hz * x0 + o01 * x1)
            k11 = -1j * (o10 * x0 - hz * x1)
            o01 = am - 1j * bm
            o10 = am + 1j * bm
            y0 = x0 + 0.5 * h * k10
            y1 = x1 + 0.5 * h * k11
            k20 = -1j * (hz * y0 + o01 * y1)
            k21 = -1j * (o10 * y0 - hz * y1)
            y0 = x0 + 0.5 * h * k20
            y1 = x1 + 0.5 * h * k21
            k30 = -1j * (hz * y0 + o01 * y1)
            k31 = -1j * (o10 * y0 - hz * y1)
            o01 = a2 - 1j * b2
            o10 = a2 + 1j * b2
            y0 = x0 + h * k30
            y1 = x1 + h * k31
            k40 = -1j * (hz * y0 + o01 * y1)
            k41 = -1j * (o10 * y0 - hz * y1)
            x0 = x0 + h / 6.0 * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
            x1 = x1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
            if col == 0:
                u00 = x0
                u10 = x1
            else:
                u01 = x0
                u11 = x1
    U = np.empty((2, 2), dtype=np.complex128)
    U[0, 0] = u00
    U[0, 1] = u01
    U[1, 0] = u10
    U[1, 1] = u11
    return U


TAU_READINGS = {
    "inverse": lambda w: 1 / w,
    "half_period": lambda w: math.pi / w,
    "period": lambda w: 2 * math.pi / w,
}


def time_ordered(Omega_d: float, d: float, delta: float, total: float, steps_per_period: int = 10_000):
    """Brute-force rotating-frame propagator over ``[0, total]``."""
    w = 1.0 - delta
    n = max(1, int(round(total / (2 * math.pi / w) * steps_per_period)))
    return _rotating_propagator(Omega_d * d, delta, w, total, n)


def stroboscopic_residuals(
    Omega_d: float,
    d: float = 1.0,
    delta: float = 0.0,
    n_periods: int = 100,
    tau: str = "period",
    steps_per_period: int = 10_000,
) -> dict[Order, float]:
    """Spectral-norm distance between the exact and effective propagators for each order."""
    if n_periods < 1:
        raise ValueError("need at least one period")
    w = 1.0 - delta
    total = n_periods * TAU_READINGS[tau](w)
    U = time_ordered(Omega_d, d, delta, total, steps_per_period)
    out = {}
    for order in Order:
        H = h_eff_matrix(EffectiveParams(delta, Omega_d * d, w, order))
        out[order] = float(np.linalg.norm(U - expm(-1j * H * total), 2))
    return out


def stroboscopic_check(
    Omega_d: float,
    d: float = 1.0,
    delta: float = 0.0,
    n_periods: int = 100,
    order: Order = Order.RWA1,
    tau: str = "period",
) -> float:
    return stroboscopic_residuals(Omega_d, d, delta, n_periods, tau)[order]


def tau_survey(Omega_d: float, n_periods: int = 100) -> dict[str, dict[Order, float]]:
    """Residuals for each candidate stroboscopic interval."""
    return {name: stroboscopic_residuals(Omega_d, n_periods=n_periods, tau=name) for name in TAU_READINGS}
