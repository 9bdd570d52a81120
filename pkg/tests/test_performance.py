"""Tests for the pre-flight estimates and the loss accounting."""

import math

import pytest

from dynamics import LinearThrust, Propulsion, propagate
from orbital import EARTH, apsis_speed, circular_speed, shape_from_apsides, state_from_polar
from performance import (
    accumulate_losses,
    estimate,
    exhaust_velocity,
    final_mass_estimate,
    gravity_loss_estimate,
    rate_gravity_loss_estimate,
    tsiolkovsky_final_mass,
)
from scenario import from_preset

R0 = EARTH.earth_radius + 150e3
GTO = shape_from_apsides(36000e3, 300e3)


def test_exhaust_velocity():
    assert exhaust_velocity(300.0) == pytest.approx(2941.995)


def test_tsiolkovsky():
    assert tsiolkovsky_final_mass(10000.0, 2942.0, 2942.0) == pytest.approx(10000.0 / math.e)
    assert tsiolkovsky_final_mass(10000.0, 0.0, 2942.0) == 10000.0


def test_gravity_loss_estimate_for_gto_ignition():
    assert gravity_loss_estimate(R0, math.radians(30.0)) == pytest.approx(535.6, abs=1.0)


def test_final_mass_estimate_for_gto():
    dv_g = gravity_loss_estimate(R0, math.radians(30.0))
    assert final_mass_estimate(10000.0, 5000.0, GTO, dv_g, 2942.0) == pytest.approx(1445.3, abs=2.0)


def test_estimate_from_preset():
    losses = estimate(from_preset("gto-linear"))
    assert losses.dv_gravity == pytest.approx(535.6, abs=1.0)
    assert losses.m_f_est == pytest.approx(1445.3, abs=2.0)
    assert losses.dv_aoa == 0.0
    assert losses.dv_total_impulse == pytest.approx(apsis_speed(GTO, "perigee") - 5000.0 + losses.dv_gravity)
    assert losses.impulse_residual is None


@pytest.mark.parametrize("gamma_deg", [1.0, 3.0])
def test_rate_form_agrees_in_small_angle_limit(gamma_deg):
    gamma = math.radians(gamma_deg)
    v_c = circular_speed(R0)
    quarter = gravity_loss_estimate(R0, gamma)
    assert rate_gravity_loss_estimate(R0, v_c, gamma) == pytest.approx(quarter, rel=0.05)


def test_rate_form_is_a_magnitude():
    assert rate_gravity_loss_estimate(R0, 5000.0, math.radians(-10.0)) > 0.0


def test_accumulated_losses_close_the_budget():
    initial = state_from_polar(150e3, 5000.0, math.radians(30.0), 10000.0)
    trajectory = propagate(initial, LinearThrust(26467.0, -10.976), Propulsion(2942.0))
    losses = accumulate_losses(trajectory)
    assert abs(losses.impulse_residual) < 1e-3
    assert losses.m_f_est == pytest.approx(trajectory.final.state.mass, rel=1e-7)
    assert losses.dv_gravity > 0.0
    assert losses.dv_aoa > 0.0
    assert losses.to_dict()["impulse_residual"] == losses.impulse_residual


def test_estimated_burn_time_matches_the_seed_thrust():
    scenario = from_preset("gto-linear")
    losses = estimate(scenario)
    seed = 0.25 * scenario.initial_mass * EARTH.g0
    burn = (scenario.initial_mass - losses.m_f_est) * scenario.propulsion.v_e / seed
    assert burn == pytest.approx(1027.0, abs=5.0)


def test_no_impulse_keeps_the_mass():
    assert final_mass_estimate(10000.0, apsis_speed(GTO, "perigee"), GTO, 0.0, 2942.0) == pytest.approx(10000.0)
    assert gravity_loss_estimate(R0, 0.0) == 0.0
