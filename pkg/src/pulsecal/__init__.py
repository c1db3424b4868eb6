"""Single-qubit pulse calibration beyond the rotating-wave approximation."""
from .model import (
    BlochState,
    CarrierSpec,
    DriveSegment,
    Envelope,
    PulseSchedule,
    QubitParams,
    Shape,
    VirtualZ,
    bloch_of,
    default_qubit,
    nondimensionalize,
)
from .calibration import Scheme

__all__ = [
    "BlochState",
    "CarrierSpec",
    "DriveSegment",
    "Envelope",
    "PulseSchedule",
    "QubitParams",
    "Scheme",
    "Shape",
    "VirtualZ",
    "bloch_of",
    "default_qubit",
    "nondimensionalize",
]
