"""Tests for the optimality checks.

The pitch law zeroes H0 pointwise for any thrust profile, so the gating
checks pass on a plain propagation while the rate gap and costate drift are
reported. A constant steering offset must make the gating checks fail.
"""

import json
import math
from dataclasses import replace

import numpy as np
import pytest

from cli import emit_trajectory
from dynamics import InjectionMode, LinearThrust, Propulsion, Trajectory, TrajectoryPoint, propagate
from errors import PropagationError
from orbital import EARTH, PolarKinematics, circular_speed, polar_to_cartesian, state_from_polar
from scenario import from_preset
from tools.pmp_verify import (
    PmpChecker,
    Severity,
    Thresholds,
    hamiltonian_at,
    propagate_costates,
    rate_mismatch_at,
    resolve_omega_sign,
    terminal_checks,
    verify_trajectory_csv,
)

PROP = Propulsion(2942.0)
LINEAR = LinearThrust(26467.0, -10.976)


@pytest.fixture(scope="module")
def initial():
    return state_from_polar(150e3, 5000.0, math.radians(30.0), 10000.0)


@pytest.fixture(scope="module")
def trajectory(initial):
    return propagate(initial, LINEAR, PROP)


@pytest.fixture(scope="module")
def report(trajectory):
    return PmpChecker(trajectory, source="gto").analyze()


def _issue(report, name):
    return next(i for i in report.issues if i.type == name)


def test_switching_function_vanishes_pointwise(trajectory):
    for point in trajectory.points[::50]:
        terms = hamiltonian_at(point, PROP)
        assert abs(terms.Phi_m) < 1e-13
        assert terms.H == pytest.approx(terms.H0 + point.thrust * terms.Phi)


def test_omega_sign_zeroes_the_hamiltonian(trajectory):
    assert resolve_omega_sign(trajectory.points, PROP) == -1
    wrong = max(abs(hamiltonian_at(p, PROP, omega_sign=1).H0_norm) for p in trajectory.points)
    assert wrong > 1e-3


def test_propagated_trajectory_passes(report):
    assert report.passed
    assert report.exit_code() == 0
    assert report.omega_sign == -1
    assert report.max_h0 < 1e-8
    for name in ("hamiltonian", "switching_function", "terminal_theta", "terminal_gamma",
                 "terminal_theta_rate", "injection_direction"):
        assert _issue(report, name).severity == Severity.PASS, name
    for name in ("omega_sign", "rate_consistency", "costate_ode", "pv_norm", "mass_costate",
                 "switching_propagated"):
        assert _issue(report, name).severity == Severity.INFO, name


def test_rate_gap_is_reported(report, trajectory):
    assert rate_mismatch_at(trajectory.points[0]) == pytest.approx(-0.046, abs=0.003)
    assert abs(rate_mismatch_at(trajectory.final)) < 1e-6
    assert 0.02 < report.max_rate_mismatch < 0.3
    gap = report.summary()["diagnostics"]["rate_consistency"]
    assert gap["value"] == report.max_rate_mismatch
    assert gap["final"] < 1e-6
    assert gap["at_time_s"] < trajectory.final.time


def test_costates_drift_from_their_closed_forms(trajectory):
    history = propagate_costates(trajectory)
    assert history.times == pytest.approx(trajectory.times)
    assert history.deviation[0] < 1e-12
    assert 0.05 < history.max_deviation < 0.5
    assert 0.05 < history.pv_norm_dev < 0.3
    assert 0.02 < history.psi_dev < 0.15
    assert 0.02 < history.phi_m < 0.15


def test_costate_propagation_needs_a_profile(trajectory):
    with pytest.raises(PropagationError) as exc:
        propagate_costates(replace(trajectory, profile=None))
    assert exc.value.reason == "no_profile"


def test_steering_offset_fails_the_checks(initial):
    offset = propagate(initial, LINEAR, PROP, steering_offset=math.radians(1.0))
    report = PmpChecker(offset).analyze()
    th = Thresholds()
    assert not report.passed
    assert report.exit_code() == 2
    assert _issue(report, "hamiltonian").severity == Severity.ERROR
    assert report.max_h0 > 100 * th.hamiltonian
    terminal = _issue(report, "terminal_theta")
    assert terminal.severity == Severity.ERROR
    assert terminal.value > 100 * th.terminal_angle
    for name in ("costate_ode", "pv_norm", "mass_costate", "switching_propagated"):
        issue = _issue(report, name)
        assert issue.value > 100 * issue.threshold, name
    assert report.costate_dev > 100 * th.costate
    assert report.max_pv_dev > 100 * th.pv_norm
    assert report.max_psi_dev > 100 * th.psi
    assert report.max_phi_propagated > 100 * th.switching_propagated


def test_terminal_checks_need_an_injection_event(trajectory):
    issues = terminal_checks(replace(trajectory, injection=None))
    assert len(issues) == 1
    assert issues[0].severity == Severity.INFO
    assert issues[0].details == {"applicable": False}


def test_terminal_summary(report):
    terminal = report.summary()["terminal"]
    assert terminal["applicable"]
    assert terminal["injection_direction"]["injection"] == "perigee"
    assert terminal["terminal_theta_rate"]["passed"]
    assert "terminal_theta_accel" not in terminal


def _circular_injection(accel_scale=1.0):
    """Five samples ending on a circular orbit with theta = a (t - t_f)^2 / 2."""
    r = EARTH.earth_radius + 300e3
    mass, thrust, t_f = 1500.0, 20000.0, 600.0
    accel = accel_scale * thrust / (mass * r)
    points = []
    for k, t in enumerate(t_f - 0.5 * np.arange(4, -1, -1)):
        gamma = -1e-4 * (4 - k)
        polar = PolarKinematics(r, circular_speed(r), gamma, 0.1)
        theta = 0.5 * accel * (t - t_f) ** 2
        points.append(TrajectoryPoint(float(t), polar_to_cartesian(polar, mass, float(t)), polar, theta,
                                      math.sqrt(EARTH.mu / r ** 3), thrust, 0.0, 0.0, 0.0))
    return Trajectory(points, None, PROP, EARTH, InjectionMode.PERIGEE, "perigee")


def test_circular_injection_angular_acceleration():
    issues = {i.type: i for i in terminal_checks(_circular_injection())}
    assert issues["terminal_theta_accel"].severity == Severity.PASS
    assert issues["terminal_theta_rate"].severity == Severity.PASS


def test_wrong_angular_acceleration_is_a_warning():
    issues = {i.type: i for i in terminal_checks(_circular_injection(accel_scale=2.0))}
    assert issues["terminal_theta_accel"].severity == Severity.WARNING
    assert issues["terminal_theta_accel"].value == pytest.approx(1.0, rel=1e-6)


def test_exported_csv_verifies(trajectory, tmp_path):
    path = emit_trajectory(trajectory, tmp_path / "gto_trajectory.csv")
    report = verify_trajectory_csv(path, from_preset("gto-linear"))
    assert report.source == "gto_trajectory.csv"
    assert report.passed
    assert _issue(report, "costate_propagation").severity == Severity.INFO
    assert _issue(report, "injection_direction").severity == Severity.PASS
    assert report.costate_dev is None
    dense = PmpChecker(trajectory).analyze()
    assert report.max_rate_mismatch == pytest.approx(dense.max_rate_mismatch, rel=1e-4)


def test_report_formats(report):
    data = json.loads(report.generate_report("json"))
    assert data["errors"] == 0
    assert data["summary"]["passed"] is True
    assert data["summary"]["p0_note"].startswith("Costates scaled")
    assert "| hamiltonian | pass |" in report.generate_report("markdown")
    assert "| costate_ode | info |" in report.generate_report("markdown")
    assert set(data["summary"]["diagnostics"]) >= {"omega_sign", "rate_consistency", "costate_ode"}
    console = report.generate_report("console")
    assert "Optimality Analysis: gto" in console
    assert "Found 0 error(s), 0 warning(s)" in console
