import csv
import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pulsecal.calibration import Scheme
from pulsecal.dynamics import (
    STEP_TOLERANCE,
    IntegratorConfig,
    carrier_phase,
    local_phase,
    propagate,
    verify_step,
)
from pulsecal.gates import build_y_gate
from pulsecal.model import GROUND, CarrierSpec, DriveSegment, Envelope, PulseSchedule, Shape, VirtualZ, bloch_of

OMEGA_01 = 0.0032966

# DOP853 (rtol 1e-13) on the lab-frame equations: gaussian T=60, sigma=12,
# Omega_d=0.05, chirped carrier c_eff=1, phi_lo=0.3, from the ground state.
ORACLE_FINAL = (-0.8030202778247457, 0.5897293283558148, 0.08589384540965472)


def square(T, Omega=OMEGA_01, carrier=None):
    return DriveSegment(Envelope(Shape.SQUARE, T), carrier or CarrierSpec.constant(), Omega)


@pytest.fixture(scope="module")
def pi_pulse():
    return build_y_gate(math.pi, Shape.SQUARE, Scheme.RWA, 0.1)


def test_carrier_phase_examples():
    assert carrier_phase(CarrierSpec.constant(), Envelope(Shape.SQUARE, 10), 0.01, 2 * math.pi) == pytest.approx(
        2 * math.pi
    )
    env = Envelope(Shape.GAUSSIAN, 50, 10)
    assert carrier_phase(CarrierSpec.chirped(1.0, 0.4), env, 0.0, 20.0) == pytest.approx(20.4)
    T = math.pi / OMEGA_01
    phi = carrier_phase(CarrierSpec.chirped(1.0), Envelope(Shape.SQUARE, T), OMEGA_01, T)
    assert phi == pytest.approx(T * (1 + 8.1506e-6), rel=1e-10)


@given(
    st.sampled_from([Shape.GAUSSIAN, Shape.SHIFTED_GAUSSIAN, Shape.SQUARE]),
    st.floats(-0.5, 1.5),
    st.floats(0, 1),
)
@settings(max_examples=30)
def test_quadrature_and_closed_form_phase_agree(shape, c, x):
    env = Envelope(shape, 2000.0, 380.0)
    t = x * env.duration
    Om = 0.0066
    a = carrier_phase(CarrierSpec.chirped(c), env, Om, t)
    b = float(local_phase(CarrierSpec.chirped(c), env, Om, t))
    assert a == pytest.approx(b, abs=1e-11)


def test_production_integrator_matches_independent_solver():
    seg = DriveSegment(Envelope(Shape.GAUSSIAN, 60.0, 12.0), CarrierSpec.chirped(1.0, 0.3), 0.05)
    final = propagate(PulseSchedule([seg])).final_bloch
    assert final.as_array() == pytest.approx(ORACLE_FINAL, abs=1e-9)


def test_zero_drive_keeps_ground_state():
    traj = propagate(PulseSchedule([square(10.0, Omega=0.0)]))
    assert traj.final_bloch.r_z == pytest.approx(1.0, abs=1e-12)


def test_free_precession_is_analytic():
    # H = -sigma_z / 2 rotates the equator: r_x = cos t, r_y = -sin t
    psi0 = np.array([1, 1]) / math.sqrt(2)
    t = 7.3
    b = propagate(PulseSchedule([square(t, Omega=0.0)]), psi0).final_bloch
    assert (b.r_x, b.r_y, b.r_z) == pytest.approx((math.cos(t), -math.sin(t), 0.0), abs=1e-10)


@given(st.floats(0, math.pi), st.floats(0, 2 * math.pi), st.floats(0.5, 40))
@settings(max_examples=25)
def test_free_evolution_preserves_population_and_coherence(theta, phi, t):
    psi0 = np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])
    b0 = bloch_of(psi0)
    b = propagate(PulseSchedule([square(t, Omega=0.0)]), psi0).final_bloch
    assert b.r_z == pytest.approx(b0.r_z, abs=1e-12)
    assert b.c_xy == pytest.approx(b0.c_xy, abs=1e-10)


def test_square_pi_pulse(pi_pulse):
    b = propagate(pi_pulse).final_bloch
    assert pi_pulse.duration == pytest.approx(952.98, abs=0.05)
    assert b.r_z == pytest.approx(-1, abs=1e-4)
    assert 2.7e-3 / 2 < b.c_xy < 2.7e-3 * 2


def test_half_duration_gives_equator():
    (seg,) = build_y_gate(math.pi, Shape.SQUARE, Scheme.RWA, 0.1).segments
    half = DriveSegment(Envelope(Shape.SQUARE, seg.duration / 2), seg.carrier, seg.Omega_d)
    b = propagate(PulseSchedule([half])).final_bloch
    assert abs(b.r_z) < 5e-3
    assert b.c_xy == pytest.approx(1, abs=1e-5)


def test_norm_conserved_at_every_sample(pi_pulse):
    traj = propagate(pi_pulse, cfg=IntegratorConfig(stride=50))
    norms = np.linalg.norm(traj.bloch, axis=1)
    assert len(norms) > 100
    assert np.max(np.abs(norms - 1)) <= 1e-7


def test_verify_step_zero_drive():
    assert verify_step(PulseSchedule([square(50.0, Omega=0.0)])) < 1e-12


def test_verify_step_compliant(pi_pulse):
    assert verify_step(pi_pulse) <= STEP_TOLERANCE


def test_verify_step_flags_coarse_step(pi_pulse, caplog):
    with caplog.at_level(logging.WARNING):
        dev = verify_step(pi_pulse, cfg=IntegratorConfig(h=2 * math.pi / 10))
    assert dev > STEP_TOLERANCE
    assert any("step" in r.message for r in caplog.records)


def test_rk4_order(pi_pulse):
    coarse = verify_step(pi_pulse, cfg=IntegratorConfig(h=2 * math.pi / 400))
    fine = verify_step(pi_pulse, cfg=IntegratorConfig(h=2 * math.pi / 800))
    assert 12 <= coarse / fine <= 20


def test_coarse_step_rejected_by_propagate(pi_pulse):
    with pytest.raises(ValueError, match="steps per carrier period"):
        propagate(pi_pulse, cfg=IntegratorConfig(h=2 * math.pi / 50))


def test_non_normalised_start_rejected(pi_pulse):
    with pytest.raises(ValueError):
        propagate(pi_pulse, np.array([1.0, 1.0]))


def test_split_segment_is_seamless():
    # the carrier phase carries over between back-to-back segments
    c = CarrierSpec.constant(1.0001, 0.2)
    one = propagate(PulseSchedule([square(300.0, 0.01, c)])).final
    two = propagate(PulseSchedule([square(123.4, 0.01, c), square(176.6, 0.01, c)])).final
    assert two == pytest.approx(one, abs=1e-9)


def test_split_chirped_segment_is_seamless():
    env = Envelope(Shape.SQUARE, 300.0)
    c = CarrierSpec.chirped(0.7)
    one = propagate(PulseSchedule([DriveSegment(env, c, 0.01)])).final
    parts = [DriveSegment(Envelope(Shape.SQUARE, T), c, 0.01) for T in (100.0, 200.0)]
    two = propagate(PulseSchedule(parts)).final
    assert two == pytest.approx(one, abs=1e-9)


def test_virtual_z_is_a_carrier_phase_offset():
    a = propagate(PulseSchedule([VirtualZ(0.7), square(200.0, 0.01)])).final
    b = propagate(PulseSchedule([square(200.0, 0.01, CarrierSpec.constant(phi_lo=0.7))])).final
    assert a == pytest.approx(b, abs=1e-12)
    c = propagate(PulseSchedule([square(100.0, 0.01), VirtualZ(0.5), VirtualZ(-0.5), square(100.0, 0.01)])).final
    d = propagate(PulseSchedule([square(200.0, 0.01)])).final
    assert c == pytest.approx(d, abs=1e-9)


def test_trajectory_csv(tmp_path, pi_pulse):
    traj = propagate(pi_pulse, cfg=IntegratorConfig(stride=1000))
    path = tmp_path / "traj.csv"
    traj.to_csv(path, drive_scale=100)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "r_x", "r_y", "r_z", "c_xy", "drive_amplitude"]
    first, last = [float(v) for v in rows[1]], [float(v) for v in rows[-1]]
    assert first[0] == 0 and first[3] == 1 and first[4] == 0
    assert first[5] == pytest.approx(100 * 0.1 * 0.0329650148, rel=1e-6)
    assert last[0] == pytest.approx(pi_pulse.duration, rel=1e-6)
    assert last[3] == pytest.approx(-1, abs=1e-4)
