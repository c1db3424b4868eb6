"""Pulse-parameter solvers for each correction scheme.

Every scheme is a triple of carrier shift, area rule and alignment rule.
Frequencies are in units of ``omega_q``.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

from . import envelopes
from .dynamics import carrier_phase
from .model import CarrierMode, CarrierSpec, Envelope, Shape

log = logging.getLogger(__name__)

WIDTH_INFLATION = 1.01
AREA_TOL = 1e-10
TWO_PI = 2 * math.pi
# Full-period alignment counts periods of the bare qubit frequency, even when
# the carrier itself is shifted.
ALIGN_FREQUENCY = 1.0


class Shift(enum.Enum):
    """Carrier frequency relative to the bare qubit, ``1 + 0.75 Omega^2 s``."""

    NONE = "none"  # s = 0
    MEAN = "mean"  # s = c1
    SCALED = "scaled"  # s = c_eff * c1
    DIRECT = "direct"  # s = c_eff
    CHIRP = "chirp"  # instantaneous, s(t) = c_eff d(t)^2


class AreaRule(enum.Enum):
    PLAIN = "plain"  # Omega int d = angle
    LOCAL = "local"  # int Omega d (1 + 3 (Omega d)^2 / 8) = angle
    SHIFTED = "shifted"  # Omega int d = angle (1 - 3 Omega^2 s / 8)


class Alignment(enum.Enum):
    NONE = "none"
    FULL_PERIODS = "full_periods"
    ZERO_CROSS = "zero_cross"


class Scheme(enum.Enum):
    RWA = "rwa"
    RWA_FULL_PERIODS = "rwa_full_periods"
    RWA_CORR = "rwa_corr"
    RWA_CORR_FULL_PERIODS = "rwa_corr_full_periods"
    RWA_EFF_CORR_FULL_PERIODS = "rwa_eff_corr_full_periods"
    RWA_TDEP_CORR_ZERO_CROSS = "rwa_tdep_corr_zero_cross"
    RWA_EFF_MEAN_CORR = "rwa_eff_mean_corr"
    RWA_EFF_OPT_CORR = "rwa_eff_opt_corr"
    RWA_EFF_OPT_CORR_FULL_PERIODS = "rwa_eff_opt_corr_full_periods"

    @classmethod
    def parse(cls, label: str) -> "Scheme":
        try:
            return cls(label.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scheme {label!r}; valid labels: {valid}") from None

    @property
    def rule(self) -> tuple[Shift, AreaRule, Alignment]:
        return _RULES[self]

    @property
    def tunable(self) -> bool:
        return self.rule[0] in (Shift.SCALED, Shift.DIRECT)

    @property
    def chirped(self) -> bool:
        return self.rule[0] is Shift.CHIRP


_RULES = {
    Scheme.RWA: (Shift.NONE, AreaRule.PLAIN, Alignment.NONE),
    Scheme.RWA_FULL_PERIODS: (Shift.NONE, AreaRule.PLAIN, Alignment.FULL_PERIODS),
    Scheme.RWA_CORR: (Shift.MEAN, AreaRule.SHIFTED, Alignment.NONE),
    Scheme.RWA_CORR_FULL_PERIODS: (Shift.MEAN, AreaRule.SHIFTED, Alignment.FULL_PERIODS),
    Scheme.RWA_EFF_CORR_FULL_PERIODS: (Shift.SCALED, AreaRule.SHIFTED, Alignment.FULL_PERIODS),
    Scheme.RWA_TDEP_CORR_ZERO_CROSS: (Shift.CHIRP, AreaRule.LOCAL, Alignment.ZERO_CROSS),
    Scheme.RWA_EFF_MEAN_CORR: (Shift.MEAN, AreaRule.PLAIN, Alignment.NONE),
    Scheme.RWA_EFF_OPT_CORR: (Shift.DIRECT, AreaRule.SHIFTED, Alignment.NONE),
    Scheme.RWA_EFF_OPT_CORR_FULL_PERIODS: (Shift.DIRECT, AreaRule.SHIFTED, Alignment.FULL_PERIODS),
}

# Shift factors used when a tunable scheme is run without optimisation.
DEFAULT_C_EFF = {
    (Shape.SQUARE, math.pi): 0.995,
    (Shape.SQUARE, math.pi / 2): 0.995,
    (Shape.GAUSSIAN, math.pi): 0.2188,
    (Shape.GAUSSIAN, math.pi / 2): -0.084,
    (Shape.SHIFTED_GAUSSIAN, math.pi): 0.2188,
    (Shape.SHIFTED_GAUSSIAN, math.pi / 2): -0.084,
}


def default_c_eff(shape: Shape, angle: float) -> float:
    return DEFAULT_C_EFF[(shape, math.pi if angle > 3 * math.pi / 4 else math.pi / 2)]


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class AreaCondition:
    """Rotation-angle condition a calibrated pulse must satisfy."""

    rule: AreaRule = AreaRule.PLAIN
    shift: Shift = Shift.NONE
    c_eff: float | None = None

    def shift_factor(self, env: Envelope, area: bool = False) -> float:
        """Carrier shift factor; ``area=True`` gives the one used by the area rule.

        A scaled shift only retunes the carrier, its area rule keeps ``c1``.
        """
        if self.shift is Shift.NONE:
            return 0.0
        if self.shift is Shift.DIRECT:
            return self.c_eff
        c1 = envelopes.mean_square_fraction(env)
        if self.shift is Shift.SCALED and not area:
            return self.c_eff * c1
        return c1

    def residual(self, env: Envelope, Omega_d: float, angle: float) -> float:
        if self.rule is AreaRule.PLAIN:
            return Omega_d * envelopes.area(env) - angle
        if self.rule is AreaRule.LOCAL:
            return envelopes.corrected_area(env, Omega_d) - angle
        s = self.shift_factor(env, area=True)
        return Omega_d * envelopes.area(env) - angle * (1 - 3 * Omega_d**2 * s / 8)


@dataclass(frozen=True)
class CalibratedPulse:
    envelope: Envelope
    carrier: CarrierSpec
    Omega_d: float
    angle: float
    condition: AreaCondition = AreaCondition()
    n_periods: int | None = None
    c_eff: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def duration(self) -> float:
        return self.envelope.duration

    def area_residual(self) -> float:
        return self.condition.residual(self.envelope, self.Omega_d, self.angle)


# ---------------------------------------------------------------- square pulses


def square_duration(target_angle: float, Omega_d: float, scheme: Scheme = Scheme.RWA) -> float:
    """``angle/Omega``, times ``1 - 3 Omega^2 / 8`` for the corrected schemes."""
    if Omega_d == 0:
        raise CalibrationError("Omega_d must be non-zero")
    if target_angle <= 0:
        raise CalibrationError("target angle must be positive")
    T = target_angle / Omega_d
    if scheme.rule[1] is not AreaRule.PLAIN:
        T *= 1 - 3 * Omega_d**2 / 8
    return T


def _square_duration(angle: float, Omega_d: float, cond: AreaCondition) -> float:
    if cond.rule is AreaRule.LOCAL:
        return angle / (Omega_d * (1 + 3 * Omega_d**2 / 8))
    env = Envelope(Shape.SQUARE, 1.0)
    s = cond.shift_factor(env, area=True) if cond.rule is AreaRule.SHIFTED else 0.0
    return angle * (1 - 3 * Omega_d**2 * s / 8) / Omega_d


def _square_amplitude(angle: float, T: float, cond: AreaCondition, guess: float) -> float:
    """Drive scale meeting the area condition for a square pulse of length T."""
    env = Envelope(Shape.SQUARE, T)
    x = guess
    for _ in range(50):
        f = cond.residual(env, x, angle)
        h = 1e-7 * x
        slope = (cond.residual(env, x + h, angle) - f) / h
        step = f / slope
        x -= step
        if abs(step) < 1e-16 * abs(x):
            break
    return x


# ------------------------------------------------------------- gaussian pulses


def _bisect(f: Callable[[float], float], lo: float, hi: float, rtol: float = 1e-15, maxiter: int = 200) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise CalibrationError(f"no sign change on [{lo:.6g}, {hi:.6g}]")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or (hi - lo) < rtol * abs(mid):
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def infinite_width(target_angle: float, Omega_d: float) -> float:
    """Width of an untruncated gaussian with the requested area."""
    return target_angle / (Omega_d * envelopes.SQRT_2PI)


def gaussian_fit(
    target_angle: float,
    Omega_d: float,
    scheme: Scheme | AreaCondition = Scheme.RWA,
    shape: Shape = Shape.GAUSSIAN,
) -> Envelope:
    """Inflate the infinite-duration width by 1 % and bisect for the duration."""
    if target_angle <= 0:
        raise CalibrationError("target angle must be positive")
    if Omega_d <= 0:
        raise CalibrationError("Omega_d must be positive")
    if not shape.is_gaussian:
        raise CalibrationError(f"{shape.value} is not a gaussian shape")
    cond = scheme if isinstance(scheme, AreaCondition) else _condition(scheme, None)
    sigma = WIDTH_INFLATION * infinite_width(target_angle, Omega_d)
    try:
        T = _bisect(lambda T: cond.residual(Envelope(shape, T, sigma), Omega_d, target_angle), 4 * sigma, 10 * sigma)
    except CalibrationError:
        raise CalibrationError(
            f"target angle {target_angle:.4g} unreachable with Omega_d={Omega_d:.4g}, sigma={sigma:.4g}"
        ) from None
    return Envelope(shape, T, sigma)


def fit_width(target_angle: float, Omega_d: float, duration: float, shape: Shape, cond: AreaCondition) -> Envelope:
    """Width meeting the area condition at a fixed duration."""
    sigma = _bisect(
        lambda s: cond.residual(Envelope(shape, duration, s), Omega_d, target_angle), duration / 10, duration / 4
    )
    return Envelope(shape, duration, sigma)


# --------------------------------------------------------------- carriers


def mean_chirp_to_constant(env: Envelope, Omega_d: float) -> float:
    """Carrier frequency at the pulse-averaged Bloch-Siegert resonance."""
    return 1 + 0.75 * Omega_d**2 * envelopes.mean_square_fraction(env)


def _condition(scheme: Scheme, c_eff: float | None) -> AreaCondition:
    shift, rule, _ = scheme.rule
    return AreaCondition(rule, shift, c_eff if scheme.tunable else None)


def _carrier(cond: AreaCondition, env: Envelope, Omega_d: float, c_eff: float | None) -> CarrierSpec:
    if cond.shift is Shift.CHIRP:
        return CarrierSpec.chirped(1.0 if c_eff is None else c_eff)
    return CarrierSpec.constant(1 + 0.75 * Omega_d**2 * cond.shift_factor(env))


# ------------------------------------------------------------- alignment


def align_full_periods(pulse: CalibratedPulse, omega_carrier: float | None = None) -> CalibratedPulse:
    """Round the duration to the nearest whole number of periods of ``omega_carrier``.

    ``omega_carrier`` defaults to the pulse's own carrier frequency. Square
    pulses restore the area condition by rescaling the drive, gaussian pulses
    by re-solving the width at the new duration.
    """
    if pulse.carrier.mode is not CarrierMode.CONSTANT:
        raise CalibrationError("full-period alignment needs a constant carrier")
    w = pulse.carrier.omega_lo if omega_carrier is None else omega_carrier
    period = TWO_PI / w
    N = round(pulse.duration / period)
    if N == 0:
        raise CalibrationError("pulse shorter than one carrier period")
    T_new = N * period
    env = pulse.envelope
    Omega = pulse.Omega_d
    if env.shape is Shape.SQUARE:
        if T_new != env.duration:
            Omega = _square_amplitude(pulse.angle, T_new, pulse.condition, Omega * env.duration / T_new)
        env = Envelope(Shape.SQUARE, T_new)
    elif T_new != env.duration:
        env = fit_width(pulse.angle, Omega, T_new, env.shape, pulse.condition)
    meta = dict(pulse.meta, rescale=Omega / pulse.Omega_d)
    return replace(pulse, envelope=env, Omega_d=Omega, n_periods=N, meta=meta)


def _wrap(phase: float) -> float:
    r = math.fmod(phase, TWO_PI)
    if r > math.pi:
        r -= TWO_PI
    elif r <= -math.pi:
        r += TWO_PI
    return r


def align_zero_crossing(pulse: CalibratedPulse, max_iter: int = 20) -> CalibratedPulse:
    """Move the pulse end to the nearest upward zero crossing of the carrier."""
    env = pulse.envelope
    carrier = pulse.carrier
    Omega = pulse.Omega_d
    c = carrier.c_eff if carrier.mode is CarrierMode.CHIRPED else 0.0
    for _ in range(max_iter):
        r = _wrap(carrier_phase(carrier, env, Omega, env.duration))
        if abs(r) < 1e-12:
            break
        if carrier.mode is CarrierMode.CONSTANT:
            w_end = carrier.omega_lo
        else:
            w_end = 1 + c * 0.75 * (Omega * envelopes.evaluate(env, env.duration)) ** 2
        T_new = env.duration - r / w_end
        if env.shape is Shape.SQUARE:
            if Omega != 0:
                Omega = _square_amplitude(pulse.angle, T_new, pulse.condition, Omega * env.duration / T_new)
            env = Envelope(Shape.SQUARE, T_new)
        else:
            env = fit_width(pulse.angle, Omega, T_new, env.shape, pulse.condition)
    N = round(carrier_phase(carrier, env, Omega, env.duration) / TWO_PI)
    return replace(pulse, envelope=env, Omega_d=Omega, n_periods=N)


# ------------------------------------------------------------ calibration


def calibrate(
    target_angle: float,
    shape: Shape,
    scheme: Scheme,
    Omega_d: float,
    c_eff: float | None = None,
) -> CalibratedPulse:
    """Pulse definition for one (angle, shape, scheme, drive) cell."""
    shift, _, alignment = scheme.rule
    if shift is Shift.CHIRP and not shape.is_gaussian:
        raise CalibrationError(f"scheme {scheme.value} requires a gaussian-family envelope")
    if Omega_d <= 0:
        raise CalibrationError("Omega_d must be positive")
    if scheme.tunable and c_eff is None:
        c_eff = default_c_eff(shape, target_angle)
    cond = _condition(scheme, c_eff)

    if shape is Shape.SQUARE:
        env = Envelope(Shape.SQUARE, _square_duration(target_angle, Omega_d, cond))
    else:
        env = gaussian_fit(target_angle, Omega_d, cond, shape)

    pulse = CalibratedPulse(
        envelope=env,
        carrier=_carrier(cond, env, Omega_d, c_eff),
        Omega_d=Omega_d,
        angle=target_angle,
        condition=cond,
        c_eff=c_eff if scheme.tunable else (1.0 if shift is Shift.CHIRP else None),
        meta={"scheme": scheme.value},
    )
    if alignment is Alignment.FULL_PERIODS:
        pulse = align_full_periods(pulse, ALIGN_FREQUENCY)
    elif alignment is Alignment.ZERO_CROSS:
        pulse = align_zero_crossing(pulse)
    return pulse


# ------------------------------------------------------------- optimiser

INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass
class OptimizeResult:
    c_eff: float
    error: float
    evaluations: int
    unimodal: bool = True
    samples: list = field(default_factory=list, repr=False)


def _looks_unimodal(samples: list[tuple[float, float]], rel: float = 1e-3) -> bool:
    pts = sorted(samples)
    vals = [v for _, v in pts]
    i = min(range(len(vals)), key=vals.__getitem__)
    slack = max(vals) * rel
    down = all(vals[k] >= vals[k + 1] - slack for k in range(i))
    up = all(vals[k] <= vals[k + 1] + slack for k in range(i, len(vals) - 1))
    return down and up


def golden_section(f: Callable[[float], float], lo: float, hi: float, width: float = 1e-4) -> OptimizeResult:
    """Golden-section minimisation down to a bracket of ``width``."""
    samples = []

    def g(x):
        v = f(x)
        samples.append((x, v))
        return v

    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = g(c), g(d)
    while b - a > width:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = g(d)
    x_best, f_best = min(samples, key=lambda s: s[1])
    unimodal = _looks_unimodal(samples)
    if not unimodal:
        log.warning("objective not unimodal on [%.4g, %.4g]; returning best sample", lo, hi)
    return OptimizeResult(x_best, f_best, len(samples), unimodal, samples)


def optimize_c_eff(
    objective: Callable[[float], float],
    bracket: tuple[float, float],
    width: float = 1e-4,
) -> OptimizeResult:
    """Minimise a coherent-error objective over the carrier shift factor."""
    return golden_section(objective, bracket[0], bracket[1], width)
