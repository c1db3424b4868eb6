import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import error, gate
from pulsecal import gates
from pulsecal.calibration import Scheme
from pulsecal.dynamics import propagate
from pulsecal.model import BlochState, CarrierMode, Shape, default_qubit

# regression value of the plain square pi pulse at amp fraction 0.2
SQUARE_RWA_PI_02 = 5.89978e-3


def test_build_plain_square_pi():
    sched = gates.build_y_gate(math.pi, Shape.SQUARE, Scheme.RWA, 0.1)
    (seg,) = sched.segments
    assert seg.duration == pytest.approx(952.98, abs=0.05)
    assert seg.carrier.mode is CarrierMode.CONSTANT
    assert seg.carrier.omega_lo == 1.0


def test_build_square_pi_half_full_periods():
    (seg,) = gates.build_y_gate(math.pi / 2, Shape.SQUARE, Scheme.RWA_FULL_PERIODS, 0.1).segments
    assert seg.duration == pytest.approx(477.52, abs=0.01)
    assert seg.Omega_d != default_qubit(0.1).Omega_d
    assert seg.Omega_d * seg.duration == pytest.approx(math.pi / 2, rel=1e-14)


def test_build_gaussian_eff_opt():
    pulse = gates.calibrate_y(math.pi, Shape.GAUSSIAN, Scheme.RWA_EFF_OPT_CORR_FULL_PERIODS, 0.1)
    Om = default_qubit(0.1).Omega_d
    assert pulse.c_eff == 0.2188
    assert pulse.carrier.omega_lo == pytest.approx(1 + 0.75 * Om**2 * 0.2188, rel=1e-15)


def test_coherent_error_definitions():
    assert gates.coherent_error(BlochState(0, 0, -1), math.pi) == 0
    assert gates.coherent_error(BlochState(0.6, 0.8, 0), math.pi / 2) == 0
    assert gates.coherent_error(BlochState(0.3, 0.4, -0.8), math.pi) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        gates.coherent_error(BlochState(0, 0, 1), 1.0)


def test_square_pi_rwa_cell():
    e = error("pi", Shape.SQUARE, Scheme.RWA, 0.2)
    assert 5.9e-3 / 2 < e < 5.9e-3 * 2
    assert e == pytest.approx(SQUARE_RWA_PI_02, rel=1e-4)


def test_square_pi_half_full_periods_cell():
    e = error("pi_half", Shape.SQUARE, Scheme.RWA_FULL_PERIODS, 0.05)
    assert 1.4e-6 / 2 < e < 1.4e-6 * 2


@pytest.mark.parametrize("amp", [0.2, 0.1, 0.05])
def test_monotone_ladder(amp):
    assert error("pi", Shape.SQUARE, Scheme.RWA_CORR_FULL_PERIODS, amp) < error("pi", Shape.SQUARE, Scheme.RWA, amp) / 10


@given(
    st.sampled_from([Scheme.RWA, Scheme.RWA_FULL_PERIODS, Scheme.RWA_CORR, Scheme.RWA_CORR_FULL_PERIODS]),
    st.sampled_from([Shape.SQUARE, Shape.GAUSSIAN]),
    st.sampled_from([0.2, 0.1, 0.05]),
)
@settings(max_examples=15)
def test_population_error_is_half_square_of_coherence(scheme, shape, amp):
    final = gate("pi", shape, scheme, amp).final
    assert (1 + final.r_z) / (final.c_xy**2 / 2) == pytest.approx(1, rel=0.5)
    assert 1 / 3 <= (1 + final.r_z) / (final.c_xy**2 / 2) <= 3


@given(st.floats(0, math.pi), st.floats(0, 1.2))
@settings(max_examples=15)
def test_state_prep_norm(theta, c):
    res = gates.state_prep(theta, Shape.SQUARE, Scheme.RWA_EFF_CORR_FULL_PERIODS, 0.2, c)
    assert abs(res.norm - 1) < 1e-6
    assert res.delta >= 0


def test_state_prep_rejects_bad_theta():
    with pytest.raises(ValueError):
        gates.state_prep(-0.1, Shape.SQUARE, Scheme.RWA, 0.1)


def test_state_prep_reuses_one_pulse():
    pulse = gates.calibrate_y(math.pi / 2, Shape.SQUARE, Scheme.RWA_FULL_PERIODS, 0.1)
    sched = gates.state_prep_schedule(1.0, pulse)
    a, z, b = sched.segments
    assert a == b
    assert z.phase == pytest.approx(math.pi - 1.0)


def test_state_prep_without_corrections_ideal_limits():
    # two plain pi/2 pulses give the sin/cos targets to RWA accuracy
    for theta in (0.0, math.pi / 3, math.pi):
        res = gates.state_prep(theta, Shape.SQUARE, Scheme.RWA_FULL_PERIODS, 0.1)
        assert res.delta < 2e-2


@pytest.mark.parametrize("amp", [0.2, 0.1])
def test_state_prep_pi_matches_y_pi(amp):
    res, _ = gates.optimize_state_prep(math.pi, Shape.SQUARE, amp)
    y = error("pi", Shape.SQUARE, Scheme.RWA_EFF_CORR_FULL_PERIODS, amp)
    assert 1 / 3 <= res.delta / y <= 3


def test_state_prep_pi_range():
    res, _ = gates.optimize_state_prep(math.pi, Shape.SQUARE, 0.1)
    assert 1e-5 <= res.delta <= 1e-4


@pytest.fixture(scope="module")
def square_profile():
    return gates.c_eff_profile([0.0, math.pi / 2, math.pi], Shape.SQUARE, 0.2)


def test_square_profile_endpoints_and_midpoint(square_profile):
    c = [c for _, c, _ in square_profile]
    assert c[0] == pytest.approx(0.996, rel=0.01)
    assert c[2] == pytest.approx(0.996, rel=0.01)
    assert c[1] == pytest.approx(0.332, rel=0.01)
    deltas = [r.delta for _, _, r in square_profile]
    assert deltas[2] == max(deltas)


def test_gaussian_profiles_are_flat():
    thetas = [0.0, math.pi / 2]
    g = [c for _, c, _ in gates.c_eff_profile(thetas, Shape.GAUSSIAN, 0.2)]
    sg = [c for _, c, _ in gates.c_eff_profile(thetas, Shape.SHIFTED_GAUSSIAN, 0.2)]
    assert max(g) - min(g) < 0.02
    assert max(sg) - min(sg) < 0.02
    assert np.mean(sg) == pytest.approx(0.115, rel=0.1)


def test_theta_grid():
    g = gates.theta_grid()
    assert len(g) == 33 and g[0] == 0 and g[-1] == math.pi
    with pytest.raises(ValueError):
        gates.theta_grid(1)
    with pytest.raises(ValueError):
        gates.c_eff_profile([], Shape.SQUARE)


def test_optimize_requires_tunable_scheme():
    with pytest.raises(ValueError):
        gates.optimize_y_gate(math.pi, Shape.SQUARE, Scheme.RWA, 0.1)


def test_run_gate_matches_propagated_schedule():
    res = gates.run_y_gate(math.pi, Shape.GAUSSIAN, Scheme.RWA_CORR, 0.1)
    final = propagate(gates.build_y_gate(math.pi, Shape.GAUSSIAN, Scheme.RWA_CORR, 0.1)).final_bloch
    assert res.final == final
