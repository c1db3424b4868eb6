"""Y rotations, virtual-Z phase shifts and the state-preparation sequence."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calibration import (
    CalibratedPulse,
    CalibrationError,
    OptimizeResult,
    Scheme,
    calibrate,
    optimize_c_eff,
)
from .dynamics import IntegratorConfig, propagate
from .model import GROUND, BlochState, DriveSegment, PulseSchedule, QubitParams, Shape, VirtualZ, default_qubit

Y_PI = math.pi
Y_PI_HALF = math.pi / 2

DEFAULT_BRACKETS = {
    (Shape.SQUARE, Y_PI): (0.9, 1.1),
    (Shape.SQUARE, Y_PI_HALF): (-1.5, 1.5),
    (Shape.GAUSSIAN, Y_PI): (0.0, 1.0),
    (Shape.GAUSSIAN, Y_PI_HALF): (-0.5, 0.5),
    (Shape.SHIFTED_GAUSSIAN, Y_PI): (0.0, 1.0),
    (Shape.SHIFTED_GAUSSIAN, Y_PI_HALF): (-0.5, 0.5),
}

STATE_PREP_BRACKETS = {
    Shape.SQUARE: (0.0, 1.2),
    Shape.GAUSSIAN: (-0.2, 0.6),
    Shape.SHIFTED_GAUSSIAN: (-0.2, 0.6),
}


def optimal_scheme(shape: Shape) -> Scheme:
    """Most refined scheme available for a shape."""
    if shape is Shape.SQUARE:
        return Scheme.RWA_EFF_CORR_FULL_PERIODS
    return Scheme.RWA_EFF_OPT_CORR_FULL_PERIODS


def _omega(amp_fraction: float, qubit: QubitParams | None) -> float:
    q = qubit if qubit is not None else default_qubit(amp_fraction)
    if qubit is not None:
        q = QubitParams(q.omega_d_max, amp_fraction, q.omega_q)
    return q.Omega_d


def segment(pulse: CalibratedPulse) -> DriveSegment:
    return DriveSegment(pulse.envelope, pulse.carrier, pulse.Omega_d)


def calibrate_y(
    angle: float,
    shape: Shape,
    scheme: Scheme,
    amp_fraction: float,
    c_eff: float | None = None,
    qubit: QubitParams | None = None,
) -> CalibratedPulse:
    if angle <= 0:
        raise CalibrationError("rotation angle must be positive")
    return calibrate(angle, shape, scheme, _omega(amp_fraction, qubit), c_eff)


def build_y_gate(
    angle: float,
    shape: Shape,
    scheme: Scheme,
    amp_fraction: float,
    c_eff: float | None = None,
    qubit: QubitParams | None = None,
) -> PulseSchedule:
    """Single-segment Y rotation. Carrier phase 0 makes the RWA drive term ``+sigma_y``."""
    return PulseSchedule((segment(calibrate_y(angle, shape, scheme, amp_fraction, c_eff, qubit)),))


def coherent_error(final: BlochState, angle: float) -> float:
    """``c_xy`` for a pi rotation, ``|r_z|`` for a pi/2 rotation from the ground state."""
    if math.isclose(angle, Y_PI):
        return final.c_xy
    if math.isclose(angle, Y_PI_HALF):
        return abs(final.r_z)
    raise ValueError(f"no coherent-error metric for angle {angle}")


@dataclass
class GateResult:
    pulse: CalibratedPulse
    final: BlochState
    error: float
    optimization: OptimizeResult | None = None


def run_y_gate(
    angle: float,
    shape: Shape,
    scheme: Scheme,
    amp_fraction: float,
    c_eff: float | None = None,
    cfg: IntegratorConfig | None = None,
    qubit: QubitParams | None = None,
) -> GateResult:
    pulse = calibrate_y(angle, shape, scheme, amp_fraction, c_eff, qubit)
    traj = propagate(PulseSchedule((segment(pulse),)), GROUND, cfg)
    final = traj.final_bloch
    return GateResult(pulse, final, coherent_error(final, angle))


def optimize_y_gate(
    angle: float,
    shape: Shape,
    scheme: Scheme,
    amp_fraction: float,
    bracket: tuple[float, float] | None = None,
    cfg: IntegratorConfig | None = None,
    width: float = 1e-4,
    qubit: QubitParams | None = None,
) -> GateResult:
    """Run the gate with the shift factor minimising its coherent error."""
    if not scheme.tunable:
        raise CalibrationError(f"scheme {scheme.value} has no tunable shift")
    bracket = bracket or DEFAULT_BRACKETS[(shape, angle)]

    def objective(c):
        return run_y_gate(angle, shape, scheme, amp_fraction, c, cfg, qubit).error

    opt = optimize_c_eff(objective, bracket, width)
    res = run_y_gate(angle, shape, scheme, amp_fraction, opt.c_eff, cfg, qubit)
    res.optimization = opt
    return res


# ------------------------------------------------------------ state prep


@dataclass
class StatePrepResult:
    theta: float
    c_xy: float
    r_z: float
    delta: float
    c_eff: float | None
    norm: float


def state_prep_schedule(theta: float, pulse: CalibratedPulse) -> PulseSchedule:
    """``Y_{pi/2} Z_{pi - theta} Y_{pi/2}`` with the Z as a carrier-phase offset."""
    seg = segment(pulse)
    return PulseSchedule((seg, VirtualZ(math.pi - theta), seg))


def prep_error(theta: float, final: BlochState) -> float:
    return math.hypot(final.c_xy - math.sin(theta), final.r_z - math.cos(theta))


def state_prep(
    theta: float,
    shape: Shape,
    scheme: Scheme,
    amp_fraction: float,
    c_eff: float | None = None,
    cfg: IntegratorConfig | None = None,
    qubit: QubitParams | None = None,
) -> StatePrepResult:
    if not 0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    pulse = calibrate_y(Y_PI_HALF, shape, scheme, amp_fraction, c_eff, qubit)
    final = propagate(state_prep_schedule(theta, pulse), GROUND, cfg).final_bloch
    return StatePrepResult(theta, final.c_xy, final.r_z, prep_error(theta, final), pulse.c_eff, final.norm)


def optimize_state_prep(
    theta: float,
    shape: Shape,
    amp_fraction: float,
    scheme: Scheme | None = None,
    bracket: tuple[float, float] | None = None,
    cfg: IntegratorConfig | None = None,
    width: float = 1e-4,
    qubit: QubitParams | None = None,
) -> tuple[StatePrepResult, OptimizeResult]:
    scheme = scheme or optimal_scheme(shape)
    bracket = bracket or STATE_PREP_BRACKETS[shape]

    def objective(c):
        return state_prep(theta, shape, scheme, amp_fraction, c, cfg, qubit).delta

    opt = optimize_c_eff(objective, bracket, width)
    return state_prep(theta, shape, scheme, amp_fraction, opt.c_eff, cfg, qubit), opt


def theta_grid(n: int = 33) -> np.ndarray:
    if n < 2:
        raise ValueError("theta grid needs at least two points")
    return np.linspace(0.0, math.pi, n)


def c_eff_profile(
    thetas,
    shape: Shape,
    amp_fraction: float = 0.2,
    cfg: IntegratorConfig | None = None,
    width: float = 1e-4,
    bracket: tuple[float, float] | None = None,
    qubit: QubitParams | None = None,
) -> list[tuple[float, float, StatePrepResult]]:
    """Per-angle optimal shift factor for the state-preparation sequence."""
    thetas = list(thetas)
    if not thetas:
        raise ValueError("empty theta grid")
    out = []
    for th in thetas:
        res, opt = optimize_state_prep(
            float(th), shape, amp_fraction, bracket=bracket, cfg=cfg, width=width, qubit=qubit
        )
        out.append((float(th), opt.c_eff, res))
    return out
