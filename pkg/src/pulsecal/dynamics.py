"""Lab-frame propagation of the driven two-level system.

Integrates ``i d/dt psi = H(t) psi`` with

    H(t) = -sigma_z / 2 + Omega_d d(t) sin(phi(t)) sigma_x

by fixed-step RK4. The drive is sampled on the half-step grid in numpy and
handed to a compiled inner loop.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numba
import numpy as np

from . import envelopes
from .model import (
    GROUND,
    BlochState,
    CarrierMode,
    CarrierSpec,
    DriveSegment,
    Envelope,
    PulseSchedule,
    VirtualZ,
    bloch_array,
    bloch_of,
)

log = logging.getLogger(__name__)

STEPS_PER_PERIOD = 1000
MIN_STEPS_PER_PERIOD = 200
STEP_TOLERANCE = 5e-9
NORM_TOLERANCE = 1e-6


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    h: float = 2 * math.pi / STEPS_PER_PERIOD
    richardson: bool = False
    stride: int = 0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"step must be positive, got {self.h}")
        if self.stride < 0:
            raise ValueError("stride must be non-negative")

    def halved(self) -> "IntegratorConfig":
        return IntegratorConfig(self.h / 2, self.richardson, 2 * self.stride)


@dataclass
class Trajectory:
    """Sampled Bloch trajectory plus final state.

    ``bloch`` has shape ``(n, 3)`` holding ``(r_x, r_y, r_z)``; ``drive`` is the
    envelope amplitude ``Omega_d * d(t)`` at each sample.
    """

    times: np.ndarray
    bloch: np.ndarray
    drive: np.ndarray
    final: np.ndarray

    @property
    def final_bloch(self) -> BlochState:
        return bloch_of(self.final)

    @property
    def c_xy(self) -> np.ndarray:
        return np.hypot(self.bloch[:, 0], self.bloch[:, 1])

    def samples(self) -> list[tuple[float, BlochState]]:
        return [(float(t), BlochState(*map(float, b))) for t, b in zip(self.times, self.bloch)]

    def rows(self, drive_scale: float = 1.0):
        for t, b, c, d in zip(self.times, self.bloch, self.c_xy, self.drive):
            yield (float(t), float(b[0]), float(b[1]), float(b[2]), float(c), float(d * drive_scale))

    def to_csv(self, path, drive_scale: float = 1.0) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "r_x", "r_y", "r_z", "c_xy", "drive_amplitude"])
            for row in self.rows(drive_scale):
                w.writerow([f"{v:.6e}" for v in row])


@numba.njit(cache=True)
def _rk4_kernel(D, h, p0, p1, stride, out):
    """RK4 for the two amplitudes. ``D[2k]`` is the drive at step k, ``D[2k+1]`` at the midpoint."""
    n = (D.shape[0] - 1) // 2
    j = 0
    out[0, 0] = p0
    out[0, 1] = p1
    for k in range(n):
        d0 = D[2 * k]
        dm = D[2 * k + 1]
        d1 = D[2 * k + 2]
        k10 = 0.5j * p0 - 1j * d0 * p1
        k11 = -1j * d0 * p0 - 0.5j * p1
        q0 = p0 + 0.5 * h * k10
        q1 = p1 + 0.5 * h * k11
        k20 = 0.5j * q0 - 1j * dm * q1
        k21 = -1j * dm * q0 - 0.5j * q1
        q0 = p0 + 0.5 * h * k20
        q1 = p1 + 0.5 * h * k21
        k30 = 0.5j * q0 - 1j * dm * q1
        k31 = -1j * dm * q0 - 0.5j * q1
        q0 = p0 + h * k30
        q1 = p1 + h * k31
        k40 = 0.5j * q0 - 1j * d1 * q1
        k41 = -1j * d1 * q0 - 0.5j * q1
        p0 = p0 + h / 6.0 * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
        p1 = p1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
        if stride > 0 and (k + 1) % stride == 0:
            j += 1
            out[j, 0] = p0
            out[j, 1] = p1
    if stride <= 0 or n % stride != 0:
        j += 1
        out[j, 0] = p0
        out[j, 1] = p1
    return j + 1


def local_phase(carrier: CarrierSpec, env: Envelope, Omega_d: float, t) -> np.ndarray:
    """Carrier phase accumulated since the segment start, without ``phi_lo``."""
    t = np.asarray(t, dtype=float)
    if carrier.mode is CarrierMode.CONSTANT:
        return carrier.omega_lo * t
    # instantaneous frequency 1 + c_eff * 0.75 * (Omega_d d)^2
    return t + carrier.c_eff * 0.75 * Omega_d**2 * envelopes.cumulative_square(env, t)


def carrier_phase(carrier: CarrierSpec, env: Envelope, Omega_d: float, t: float) -> float:
    """Phase ``phi(t) + phi_lo`` of the carrier, chirp integrated by adaptive quadrature."""
    if carrier.mode is CarrierMode.CONSTANT:
        return carrier.omega_lo * t + carrier.phi_lo
    shift = envelopes.square_integral(env, upper=t) if t > 0 else 0.0
    return t + carrier.c_eff * 0.75 * Omega_d**2 * shift + carrier.phi_lo


def _steps(duration: float, h: float) -> int:
    return max(1, int(math.ceil(duration / h - 1e-9)))


def _check_resolution(seg: DriveSegment, cfg: IntegratorConfig) -> None:
    c = seg.carrier
    w = c.omega_lo if c.mode is CarrierMode.CONSTANT else 1 + abs(c.c_eff) * 0.75 * seg.Omega_d**2
    if cfg.h > 2 * math.pi / w / MIN_STEPS_PER_PERIOD:
        raise ValueError(
            f"step {cfg.h:.3g} gives fewer than {MIN_STEPS_PER_PERIOD} steps per carrier period"
        )


def _run(schedule: PulseSchedule, psi0, cfg: IntegratorConfig, strict: bool) -> Trajectory:
    psi = np.asarray(psi0, dtype=complex).copy()
    norm0 = float(np.vdot(psi, psi).real)
    if abs(norm0 - 1) > NORM_TOLERANCE:
        raise ValueError(f"initial state not normalised (|psi|^2 = {norm0})")

    times, states, drive = [np.array([0.0])], [psi[None, :]], [np.array([0.0])]
    t_start = 0.0
    vz = 0.0
    accumulated = 0.0
    for seg in schedule.segments:
        if isinstance(seg, VirtualZ):
            vz += seg.phase
            continue
        env = seg.envelope
        if strict:
            _check_resolution(seg, cfg)
        n = _steps(env.duration, cfg.h)
        h = env.duration / n
        grid = np.linspace(0.0, env.duration, 2 * n + 1)
        amp = seg.Omega_d * envelopes.evaluate(env, grid)
        phase = local_phase(seg.carrier, env, seg.Omega_d, grid)
        D = amp * np.sin(phase + seg.carrier.phi_lo + vz + accumulated)
        accumulated += float(phase[-1])

        rows = (n // cfg.stride + 2) if cfg.stride > 0 else 2
        out = np.empty((rows, 2), dtype=np.complex128)
        m = _rk4_kernel(D, h, complex(psi[0]), complex(psi[1]), cfg.stride, out)
        out = out[:m]
        psi = out[-1].copy()

        if cfg.stride > 0:
            idx = np.arange(m) * cfg.stride
            idx[-1] = n
        else:
            idx = np.array([0, n])
        if len(times) == 1:
            drive[0] = amp[:1].copy()
        times.append(t_start + idx[1:] * h)
        states.append(out[1:])
        drive.append(amp[2 * idx[1:]])
        t_start += env.duration

        drift = abs(float(np.vdot(psi, psi).real) - 1)
        if strict and drift > NORM_TOLERANCE:
            raise IntegrationError(
                f"norm drift {drift:.2e} exceeds {NORM_TOLERANCE:g} with step h={h:.4g}; "
                f"reduce the step (currently {env.duration / h:.0f} steps for this segment)"
            )

    all_states = np.concatenate(states)
    return Trajectory(
        times=np.concatenate(times),
        bloch=bloch_array(all_states),
        drive=np.concatenate(drive),
        final=psi,
    )


def propagate(schedule: PulseSchedule, psi0=GROUND, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Integrate the schedule from ``psi0``.

    VirtualZ entries shift the carrier phase of every later drive segment and
    consume no time. Carrier phase is continuous across segment boundaries.
    """
    cfg = cfg or IntegratorConfig()
    traj = _run(schedule, psi0, cfg, strict=True)
    if cfg.richardson:
        dev = _deviation(traj, _run(schedule, psi0, cfg.halved(), strict=True))
        if dev > STEP_TOLERANCE:
            log.warning("step-halving deviation %.2e exceeds %.1e", dev, STEP_TOLERANCE)
    return traj


def _deviation(a: Trajectory, b: Trajectory) -> float:
    return float(np.max(np.abs(a.final_bloch.as_array() - b.final_bloch.as_array())))


def verify_step(schedule: PulseSchedule, psi0=GROUND, cfg: IntegratorConfig | None = None) -> float:
    """Largest change of a final Bloch component when the step is halved."""
    cfg = cfg or IntegratorConfig()
    coarse = _run(schedule, psi0, IntegratorConfig(cfg.h), strict=False)
    fine = _run(schedule, psi0, IntegratorConfig(cfg.h / 2), strict=False)
    dev = _deviation(coarse, fine)
    if dev > STEP_TOLERANCE:
        log.warning("step h=%.4g fails the %.1e accuracy target (deviation %.2e)", cfg.h, STEP_TOLERANCE, dev)
    return dev
