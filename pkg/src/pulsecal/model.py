"""Core value types and Bloch-vector algebra.

All quantities are dimensionless: frequencies are in units of the qubit
angular frequency (``omega_q = 1``) and times in units of ``1/omega_q``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

# IBMQ-Manila qubit 0 backend values (treated as angular frequencies, rad/s).
OMEGA_Q_RAW = 29806862687.393623
OMEGA_D_MAX_RAW = 982583670.175613

AMP_FRACTIONS = (0.2, 0.1, 0.05)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

GROUND = np.array([1.0, 0.0], dtype=complex)


@dataclass(frozen=True)
class QubitParams:
    """Qubit frequency and drive scale, already in ``omega_q = 1`` units."""

    omega_d_max: float
    amp_fraction: float = 1.0
    omega_q: float = 1.0

    def __post_init__(self):
        if not self.omega_q > 0:
            raise ValueError(f"omega_q must be positive, got {self.omega_q}")
        if not 0 < self.amp_fraction <= 1:
            raise ValueError(f"amp_fraction must lie in (0, 1], got {self.amp_fraction}")
        if not self.omega_d_max > 0:
            raise ValueError(f"omega_d_max must be positive, got {self.omega_d_max}")

    @property
    def Omega_d(self) -> float:
        return self.amp_fraction * self.omega_d_max

    @property
    def weak_driving(self) -> bool:
        return 0 < self.Omega_d / self.omega_q < 0.1


def nondimensionalize(omega_q: float, omega_d_max: float, amp_fraction: float = 1.0) -> QubitParams:
    """Rescale raw angular frequencies so that ``omega_q = 1``."""
    for name, val in (("omega_q", omega_q), ("omega_d_max", omega_d_max)):
        if not (math.isfinite(val) and val > 0):
            raise ValueError(f"{name} must be finite and positive, got {val}")
    return QubitParams(omega_d_max=omega_d_max / omega_q, amp_fraction=amp_fraction)


def default_qubit(amp_fraction: float = 1.0) -> QubitParams:
    return nondimensionalize(OMEGA_Q_RAW, OMEGA_D_MAX_RAW, amp_fraction)


class Shape(enum.Enum):
    SQUARE = "square"
    GAUSSIAN = "gaussian"
    SHIFTED_GAUSSIAN = "shifted_gaussian"

    @property
    def is_gaussian(self) -> bool:
        return self is not Shape.SQUARE


@dataclass(frozen=True)
class Envelope:
    """Pulse envelope on ``[0, duration]``; ``sigma`` is ignored for squares."""

    shape: Shape
    duration: float
    sigma: float = 0.0

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.shape.is_gaussian:
            if not self.sigma > 0:
                raise ValueError(f"gaussian width must be positive, got {self.sigma}")
            # edge amplitude below e^-2
            if self.duration < 4 * self.sigma * (1 - 1e-12):
                raise ValueError(
                    f"gaussian duration {self.duration} shorter than 4 sigma ({4 * self.sigma})"
                )


class CarrierMode(enum.Enum):
    CONSTANT = "constant"
    CHIRPED = "chirped"


@dataclass(frozen=True)
class CarrierSpec:
    """Carrier frequency program.

    Constant mode drives at ``omega_lo``. Chirped mode follows the
    instantaneous shifted resonance ``1 + c_eff * 0.75 * (Omega_d d(t))**2``.
    """

    mode: CarrierMode = CarrierMode.CONSTANT
    omega_lo: float = 1.0
    c_eff: float = 1.0
    phi_lo: float = 0.0

    def __post_init__(self):
        if self.mode is CarrierMode.CONSTANT and not abs(self.omega_lo - 1.0) < 0.05:
            raise ValueError(f"carrier {self.omega_lo} is not near resonance")

    @classmethod
    def constant(cls, omega_lo: float = 1.0, phi_lo: float = 0.0) -> "CarrierSpec":
        return cls(CarrierMode.CONSTANT, omega_lo=omega_lo, phi_lo=phi_lo)

    @classmethod
    def chirped(cls, c_eff: float = 1.0, phi_lo: float = 0.0) -> "CarrierSpec":
        return cls(CarrierMode.CHIRPED, c_eff=c_eff, phi_lo=phi_lo)

    def with_phase(self, phi_lo: float) -> "CarrierSpec":
        return CarrierSpec(self.mode, self.omega_lo, self.c_eff, phi_lo)


@dataclass(frozen=True)
class DriveSegment:
    envelope: Envelope
    carrier: CarrierSpec
    Omega_d: float

    @property
    def duration(self) -> float:
        return self.envelope.duration


@dataclass(frozen=True)
class VirtualZ:
    """Phase offset added to the carrier of every later segment."""

    phase: float
    duration: float = field(default=0.0, init=False)


Segment = Union[DriveSegment, VirtualZ]


@dataclass(frozen=True)
class PulseSchedule:
    segments: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        for seg in self.segments:
            if not isinstance(seg, (DriveSegment, VirtualZ)):
                raise TypeError(f"unsupported segment {seg!r}")

    @property
    def duration(self) -> float:
        return sum(seg.duration for seg in self.segments)

    @property
    def drives(self) -> list[DriveSegment]:
        return [s for s in self.segments if isinstance(s, DriveSegment)]

    def then(self, *more: Segment) -> "PulseSchedule":
        return PulseSchedule(self.segments + tuple(more))


@dataclass(frozen=True)
class BlochState:
    r_x: float
    r_y: float
    r_z: float

    @property
    def c_xy(self) -> float:
        return math.hypot(self.r_x, self.r_y)

    @property
    def norm(self) -> float:
        return math.sqrt(self.r_x**2 + self.r_y**2 + self.r_z**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.r_x, self.r_y, self.r_z])


def bloch_of(psi) -> BlochState:
    """Expectation values of the Pauli operators for a pure state ``(a0, a1)``."""
    a0, a1 = complex(psi[0]), complex(psi[1])
    if not all(math.isfinite(v) for v in (a0.real, a0.imag, a1.real, a1.imag)):
        raise ValueError("state amplitudes must be finite")
    coh = a0.conjugate() * a1
    return BlochState(2 * coh.real, 2 * coh.imag, abs(a0) ** 2 - abs(a1) ** 2)


def bloch_array(psi: np.ndarray) -> np.ndarray:
    """Vectorised ``bloch_of`` for an ``(n, 2)`` array of states; returns ``(n, 3)``."""
    psi = np.atleast_2d(psi)
    coh = np.conj(psi[:, 0]) * psi[:, 1]
    rz = np.abs(psi[:, 0]) ** 2 - np.abs(psi[:, 1]) ** 2
    return np.column_stack([2 * coh.real, 2 * coh.imag, rz])
