"""Tests for thrust profiles, equations of motion and event-terminated propagation."""

import math

import numpy as np
import pytest

from dynamics import (
    BilevelThrust,
    IntegratorConfig,
    InjectionMode,
    LinearThrust,
    Propulsion,
    equations_of_motion,
    propagate,
    rhs,
    thrust_at,
)
from errors import InfeasibleProfileError, InvalidProfileError, PropagationError, ScenarioError
from orbital import EARTH, circular_speed, shape_from_state, state_from_polar

PROP = Propulsion(2942.0)
LINEAR = LinearThrust(26467.0, -10.976)


@pytest.fixture(scope="module")
def initial():
    return state_from_polar(150e3, 5000.0, math.radians(30.0), 10000.0)


@pytest.fixture(scope="module")
def trajectory(initial):
    return propagate(initial, LINEAR, PROP)


def test_linear_thrust_profile():
    assert LINEAR.at(0.0) == 26467.0
    assert LINEAR.at(1000.0) == pytest.approx(26467.0 - 10976.0)
    assert LINEAR.at(110.0, t0=10.0) == pytest.approx(26467.0 - 1097.6)
    assert LINEAR.switch_times() == []
    assert LINEAR.min_thrust(1000.0) == pytest.approx(15491.0)
    assert LINEAR.with_params((1.0, 2.0)) == LinearThrust(1.0, 2.0)


def test_bilevel_thrust_switches_at_t1():
    profile = BilevelThrust(30000.0, 12000.0, 500.0)
    assert profile.at(499.999) == 30000.0
    assert profile.at(500.0) == 12000.0
    assert thrust_at(profile, 600.0, t0=100.0) == 12000.0
    assert profile.switch_times(t0=100.0) == [600.0]
    assert profile.min_thrust(400.0) == 30000.0
    assert profile.min_thrust(800.0) == 12000.0
    assert profile.with_params((1.0, 2.0)).t1 == 500.0


def test_propulsion_from_isp():
    assert Propulsion.from_isp(300.0).v_e == pytest.approx(2941.995)
    with pytest.raises(InvalidProfileError):
        Propulsion(0.0)


def test_integrator_config_validation():
    with pytest.raises(ScenarioError):
        IntegratorConfig(rel_tol=-1.0)
    refined = IntegratorConfig().refined(0.5)
    assert refined.rel_tol == pytest.approx(5e-11)
    assert refined.abs_tol == pytest.approx(5e-7)


def test_equations_of_motion_at_ignition(initial):
    derivative = equations_of_motion(initial, 26467.0, PROP)
    gravity = -EARTH.mu / initial.radius ** 3 * initial.position
    assert derivative[:2] == pytest.approx(initial.velocity)
    assert np.linalg.norm(derivative[2:4] - gravity) == pytest.approx(26467.0 / 10000.0)
    assert derivative[4] == pytest.approx(-26467.0 / 2942.0)


def test_perigee_injection(trajectory):
    final = trajectory.final
    assert trajectory.injection == "perigee"
    assert abs(final.polar.gamma) < 1e-10
    assert trajectory.min_gamma < 0.0
    assert np.all(np.diff(trajectory.times) > 0)
    assert 1200.0 < trajectory.duration < 1400.0
    assert 250.0 < final.polar.altitude / 1000.0 < 350.0
    assert final.state.mass == pytest.approx(10000.0 - (26467.0 * trajectory.duration
                                                        - 0.5 * 10.976 * trajectory.duration ** 2) / 2942.0)


def test_injected_orbit_is_near_the_gto(trajectory):
    shape = shape_from_state(trajectory.final.state)
    apogee_km, perigee_km = shape.altitudes_km()
    assert perigee_km == pytest.approx(300.0, abs=50.0)
    assert apogee_km == pytest.approx(36000.0, rel=0.1)


def test_first_sample_is_the_initial_state(trajectory, initial):
    assert trajectory.initial.state.position == pytest.approx(initial.position)
    assert trajectory.state_vector(trajectory.t0)[:5] == pytest.approx(
        np.concatenate([initial.position, initial.velocity, [initial.mass]]))
    assert trajectory.initial.thrust == 26467.0


def test_loss_quadratures_close_the_impulse_budget(trajectory):
    first, final = trajectory.initial, trajectory.final
    gain = final.polar.v - first.polar.v
    assert gain + final.dv_gravity + final.dv_aoa == pytest.approx(final.dv_impulse, abs=1e-3)
    assert final.dv_impulse == pytest.approx(2942.0 * math.log(10000.0 / final.state.mass), rel=1e-7)
    assert final.dv_aoa > 0.0


def test_point_at_interpolates_dense_solution(trajectory):
    point = trajectory.point_at(trajectory.t0 + 500.0)
    assert point.time == pytest.approx(trajectory.t0 + 500.0)
    assert point.thrust == pytest.approx(LINEAR.at(500.0))


def test_apogee_mode_stops_at_the_first_downward_crossing(initial, trajectory):
    apogee = propagate(initial, LINEAR, PROP, InjectionMode.APOGEE)
    first = propagate(initial, LINEAR, PROP, InjectionMode.FIRST)
    assert apogee.injection == "apogee"
    assert apogee.duration < trajectory.duration
    assert apogee.gammas[:-1].max() > 0.0
    assert first.injection == "apogee"
    assert first.duration == pytest.approx(apogee.duration)


def test_bilevel_switch_is_a_step_boundary(initial):
    profile = BilevelThrust(26339.0, 13799.0, 500.0)
    trajectory = propagate(initial, profile, PROP)
    assert 500.0 in trajectory.step_times
    before = trajectory.point_at(499.0)
    after = trajectory.point_at(501.0)
    assert before.thrust == 26339.0
    assert after.thrust == 13799.0


def test_steering_offset_changes_the_trajectory(initial, trajectory):
    offset = propagate(initial, LINEAR, PROP, steering_offset=math.radians(1.0))
    assert offset.steering_offset == pytest.approx(math.radians(1.0))
    assert offset.final.state.mass != pytest.approx(trajectory.final.state.mass, abs=1e-3)


def test_thrust_reaching_zero_is_invalid(initial):
    with pytest.raises(InvalidProfileError):
        propagate(initial, LinearThrust(1000.0, -10.0), PROP)


def test_propellant_depletion_is_infeasible(initial):
    with pytest.raises(InfeasibleProfileError):
        propagate(initial, LinearThrust(300000.0, 0.0), Propulsion(2942.0, dry_mass=5000.0))


def test_no_injection_before_max_time(initial):
    with pytest.raises(PropagationError) as exc:
        propagate(initial, LINEAR, PROP, cfg=IntegratorConfig(max_time=100.0))
    assert exc.value.reason == "max_time_exceeded"


def test_state_just_below_perigee_injects_at_once():
    start = state_from_polar(300e3, 7800.0, -1e-6, 10000.0)
    trajectory = propagate(start, LINEAR, PROP)
    assert trajectory.injection == "perigee"
    assert trajectory.duration < 1.0
    assert trajectory.final.state.mass == pytest.approx(10000.0, rel=1e-3)


def test_rhs_on_circular_state_thrusts_along_velocity():
    state = state_from_polar(300e3, circular_speed(EARTH.earth_radius + 300e3), 0.0, 2000.0, phi=0.4)
    derivative = rhs(state, LinearThrust(20000.0, 0.0), PROP)
    thrust_accel = derivative[2:4] + EARTH.mu / state.radius ** 3 * state.position
    assert thrust_accel == pytest.approx(10.0 * state.velocity / state.speed)
    assert derivative[4] == pytest.approx(-20000.0 / 2942.0)


def test_energy_rate_is_thrust_power(initial):
    derivative = rhs(initial, LINEAR, PROP)
    accel = derivative[2:4]
    energy_rate = initial.velocity @ accel + EARTH.mu / initial.radius ** 3 * (initial.position @ initial.velocity)
    thrust_accel = accel + EARTH.mu / initial.radius ** 3 * initial.position
    assert energy_rate == pytest.approx(thrust_accel @ initial.velocity)
    assert energy_rate > 0.0
    assert np.linalg.norm(thrust_accel) == pytest.approx(26467.0 / 10000.0)
