#!/usr/bin/env python3
"""
Optimality Checker for AscentCraft trajectories.

Asserts the Pontryagin necessary conditions along a propagated ascent:
- Hamiltonian H = H0 + T Phi vanishes (H0 = p_r.v + p_v.g, normalized by mu/r^2)
- Switching function Phi = |p_v|/m - p_m/v_e vanishes
- Injection geometry: theta_f = gamma_f = 0, d(theta)/dt = (v - v_c)/r at t_f

and measures, without failing on them, how far the flight is from a
stationary arc:
- Rate mismatch between the thrust direction rate dphi/dt - dtheta/dt and
  the closed-form omega. The pitch law zeroes H0 with the closed-form omega
  but a prescribed thrust history does not make the flown rate equal to it,
  except at the gamma = 0 injection.
- Costate ODE integrated from ignition against the closed-form costates,
  drift of |p_v| and of Psi = m p_m. These follow from the rate mismatch.

Costates are normalized with |p_v| = 1, which fixes p_m = v_e/m.

Usage:
    python3 tools/pmp_verify.py <scenario.yaml|preset|trajectory.csv> [--json] [--markdown] [--strict]

Exit codes:
    0 - All checks pass
    1 - Warnings found
    2 - Errors found
    3 - Script error
"""

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from dynamics import InjectionMode, Propulsion, Trajectory, TrajectoryPoint, pitch_for_state  # noqa: E402
from errors import AscentError, OrbitInputError, PropagationError, ScenarioError  # noqa: E402
from orbital import (  # noqa: E402
    EARTH,
    Constants,
    PlanarState,
    PolarKinematics,
    circular_speed,
    polar_to_cartesian,
    shape_from_state,
)
from steering import angular_rate, pitch_rate, reconstruct_costates, solve_pitch  # noqa: E402

logger = logging.getLogger(__name__)

P0_NOTE = ("Costates scaled to |p_v| = 1 (p0 < 0 for the minimum-fuel cost); "
           "every check is invariant under positive rescaling.")


class Severity(Enum):
    PASS = "pass"
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


@dataclass
class Issue:
    type: str
    severity: Severity
    description: str
    value: Optional[float] = None
    threshold: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Thresholds:
    """Pass thresholds for the gating checks, stationarity references for the diagnostics."""
    hamiltonian: float = 1e-8  # |H0| r^2 / mu
    switching: float = 1e-13  # |Phi| m, closed form
    rate: float = 1e-6  # relative, diagnostic
    switching_propagated: float = 2e-8  # |Phi| m, propagated costates, diagnostic
    pv_norm: float = 1e-8  # diagnostic
    psi: float = 1e-8  # relative, diagnostic
    costate: float = 1e-6  # relative, diagnostic
    terminal_angle: float = 1e-8  # rad
    theta_rate: float = 1e-4  # rad/s
    theta_accel_rel: float = 0.05
    circular_eccentricity: float = 1e-3
    fd_step: float = 0.5  # s, terminal finite-difference spacing
    costate_rtol: float = 1e-12


@dataclass(frozen=True)
class HamiltonianTerms:
    H: float
    H0: float
    Phi: float
    H_norm: float  # H r^2 / mu
    H0_norm: float
    Phi_m: float  # Phi m


@dataclass
class CostateHistory:
    """Costates integrated from ignition, sampled at the trajectory dates."""
    times: np.ndarray
    p_r: np.ndarray
    p_v: np.ndarray
    p_m: np.ndarray
    deviation: np.ndarray  # relative, against the closed forms
    pv_norm_dev: float
    psi_dev: float
    phi_m: float

    @property
    def max_deviation(self) -> float:
        return float(self.deviation.max())


# =============================================================================
# Pointwise Conditions
# =============================================================================

def hamiltonian_at(point: TrajectoryPoint, prop: Propulsion, c: Constants = EARTH,
                   omega_sign: int = -1) -> HamiltonianTerms:
    """H, H0 and Phi at a sample from the closed-form costates.

    ``omega_sign`` multiplies the positive angular rate before it enters the
    position costate.
    """
    state = point.state
    costates = reconstruct_costates(point.theta, point.polar.phi, omega_sign * abs(point.omega),
                                    state.mass, prop.v_e)
    r = state.radius
    gravity = -c.mu / r ** 3 * state.position
    h0 = float(costates.p_r @ state.velocity + costates.p_v @ gravity)
    phi = float(np.linalg.norm(costates.p_v) / state.mass - costates.p_m / prop.v_e)
    h = h0 + point.thrust * phi
    scale = r * r / c.mu
    return HamiltonianTerms(h, h0, phi, h * scale, h0 * scale, phi * state.mass)


def resolve_omega_sign(points: Sequence[TrajectoryPoint], prop: Propulsion, c: Constants = EARTH) -> int:
    """Sign assignment of omega in the position costate that zeroes H0."""
    def worst(sign):
        return max(abs(hamiltonian_at(p, prop, c, sign).H0_norm) for p in points)
    return min((-1, 1), key=worst)


def rate_mismatch_at(point: TrajectoryPoint, c: Constants = EARTH, steering_offset: float = 0.0) -> float:
    """Relative gap (dphi/dt - dtheta/dt - omega) / omega at a sample.

    Zero on a stationary arc. Vanishes at gamma = 0 for any thrust level.
    """
    polar = point.polar
    accel = point.thrust / point.state.mass
    theta_dot = pitch_rate(polar.r, polar.v, polar.gamma, accel, c, steering_offset)
    flown_rate = polar.v * math.cos(polar.gamma) / polar.r - theta_dot
    omega = angular_rate(polar.r, point.theta, c)
    return (flown_rate - omega) / omega


# =============================================================================
# Costate Propagation
# =============================================================================

def _augmented_rhs(t, y, profile, prop, c, t0, offset):
    x, yy, vx, vy, m = y[0], y[1], y[2], y[3], y[4]
    p_r, p_v = y[5:7], y[7:9]
    thrust = profile.at(t, t0)

    r = math.hypot(x, yy)
    v = math.hypot(vx, vy)
    gamma = math.atan2((x * vx + yy * vy) / r, (x * vy - yy * vx) / r)
    phi = math.atan2(yy, x)
    theta = solve_pitch(r, v, gamma, c) + offset
    u = np.array([math.sin(theta - phi), math.cos(theta - phi)])

    mu_r3 = c.mu / r ** 3
    rhat = np.array([x, yy]) / r
    gradient = mu_r3 * (3.0 * np.outer(rhat, rhat) - np.eye(2))
    accel = thrust / m
    return np.concatenate([
        [vx, vy, -mu_r3 * x + accel * u[0], -mu_r3 * yy + accel * u[1], -thrust / prop.v_e],
        -gradient @ p_v,
        -p_r,
        [accel / m * float(p_v @ u)],
    ])


def propagate_costates(trajectory: Trajectory, omega_sign: int = -1,
                       rtol: float = 1e-12) -> CostateHistory:
    """Integrate state and costates from the closed forms at ignition.

    The costate ODE is p_r' = -(dg/dr) p_v, p_v' = -p_r, p_m' = (T/m^2) p_v.u
    with the exact planar gravity gradient. The state is integrated again
    alongside so both sides of the comparison share one trajectory.
    """
    if trajectory.profile is None:
        raise PropagationError("Costate propagation needs the thrust profile", reason="no_profile")
    c, prop = trajectory.constants, trajectory.propulsion
    first = trajectory.initial
    start = reconstruct_costates(first.theta, first.polar.phi, omega_sign * abs(first.omega),
                                 first.state.mass, prop.v_e)
    y = np.concatenate([first.state.position, first.state.velocity, [first.state.mass],
                        start.p_r, start.p_v, [start.p_m]])
    atol = np.array([1e-6] * 4 + [1e-9] + [1e-15] * 2 + [1e-13] * 2 + [1e-13])

    t0, t_f = trajectory.t0, trajectory.final.time
    times = trajectory.times
    bounds = [t0] + [tb for tb in trajectory.profile.switch_times(t0) if t0 < tb < t_f] + [t_f]
    fun = partial(_augmented_rhs, profile=trajectory.profile, prop=prop, c=c, t0=t0,
                  offset=trajectory.steering_offset)

    samples = []
    for k, (a, b) in enumerate(zip(bounds[:-1], bounds[1:])):
        last = k == len(bounds) - 2
        inside = times[(times >= a) & ((times <= b) if last else (times < b))]
        t_eval = np.union1d(inside, [b])
        sol = solve_ivp(fun, (a, b), y, method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol)
        if not sol.success:
            raise PropagationError(f"Costate propagation failed: {sol.message}")
        keep = np.isin(sol.t, inside)
        samples.append((sol.t[keep], sol.y[:, keep]))
        y = sol.y[:, -1]

    t_all = np.concatenate([s[0] for s in samples])
    y_all = np.concatenate([s[1] for s in samples], axis=1)
    p_r, p_v, p_m = y_all[5:7].T, y_all[7:9].T, y_all[9]

    deviation = np.empty(t_all.size)
    for k in range(t_all.size):
        state = PlanarState(y_all[0:2, k], y_all[2:4, k], float(y_all[4, k]), float(t_all[k]))
        theta, polar_state = pitch_for_state(state, c, trajectory.steering_offset)
        omega = angular_rate(polar_state.r, theta, c)
        closed = reconstruct_costates(theta, polar_state.phi, omega_sign * omega, state.mass, prop.v_e)
        deviation[k] = max(np.linalg.norm(p_v[k] - closed.p_v),
                           np.linalg.norm(p_r[k] - closed.p_r) / omega,
                           abs(p_m[k] - closed.p_m) / closed.p_m)

    masses = y_all[4]
    pv_norm = np.linalg.norm(p_v, axis=1)
    psi = masses * p_m
    return CostateHistory(
        times=t_all,
        p_r=p_r,
        p_v=p_v,
        p_m=p_m,
        deviation=deviation,
        pv_norm_dev=float(np.abs(pv_norm - 1.0).max()),
        psi_dev=float(np.abs(psi / psi[0] - 1.0).max()),
        phi_m=float(np.abs(pv_norm - psi / prop.v_e).max()),
    )


# =============================================================================
# Terminal Conditions
# =============================================================================

def _terminal_derivatives(trajectory: Trajectory, h: float):
    """(theta_dot, theta_ddot) at t_f from a 4th-degree fit on 5 trailing samples."""
    t_f = trajectory.final.time
    if trajectory.solution is not None and trajectory.profile is not None:
        times = t_f - h * np.arange(5)
        thetas = [trajectory.final.theta] + [trajectory.point_at(t).theta for t in times[1:]]
    else:
        tail = trajectory.points[-5:]
        times = np.array([p.time for p in tail])
        thetas = [p.theta for p in tail]
    coeffs = np.polynomial.polynomial.polyfit(np.asarray(times) - t_f, thetas, 4)
    return float(coeffs[1]), float(2.0 * coeffs[2])


def terminal_checks(trajectory: Trajectory, thresholds: Optional[Thresholds] = None) -> List[Issue]:
    """Injection geometry at the gamma = 0 event."""
    th = thresholds or Thresholds()
    c = trajectory.constants
    if trajectory.injection is None or len(trajectory.points) < 5:
        return [Issue("terminal", Severity.INFO, "Trajectory not terminated by a gamma = 0 event: "
                      "terminal checks inapplicable", details={"applicable": False})]

    final = trajectory.final
    r_f, v_f = final.polar.r, final.polar.v
    v_c = circular_speed(r_f, c)
    rate_fd, accel_fd = _terminal_derivatives(trajectory, th.fd_step)
    rate_expected = (v_f - v_c) / r_f
    issues = []

    def check(name, ok, description, value=None, threshold=None, severity=Severity.ERROR, **details):
        issues.append(Issue(name, Severity.PASS if ok else severity, description, value, threshold, details))

    check("terminal_theta", abs(final.theta) < th.terminal_angle,
          f"|theta_f| = {abs(final.theta):.3e} rad", abs(final.theta), th.terminal_angle)
    check("terminal_gamma", abs(final.polar.gamma) < th.terminal_angle,
          f"|gamma_f| = {abs(final.polar.gamma):.3e} rad", abs(final.polar.gamma), th.terminal_angle)
    check("terminal_theta_rate", abs(rate_fd - rate_expected) < th.theta_rate,
          f"d(theta)/dt at t_f = {rate_fd:.6e} rad/s, (v_f - v_c)/r_f = {rate_expected:.6e} rad/s",
          abs(rate_fd - rate_expected), th.theta_rate, theta_rate=rate_fd, expected=rate_expected)

    gammas_before = trajectory.gammas[:-1]
    if trajectory.injection == "perigee":
        check("injection_direction", v_f > v_c and rate_fd > 0 and gammas_before.min() < 0,
              f"Downward injection at perigee: v_f = {v_f:.1f} m/s, v_c = {v_c:.1f} m/s, "
              f"min gamma = {math.degrees(gammas_before.min()):.4f} deg",
              injection="perigee", v_f=v_f, v_c=v_c)
    else:
        check("injection_direction", v_f < v_c and rate_fd < 0 and gammas_before[-1] > 0,
              f"Upward injection at apogee: v_f = {v_f:.1f} m/s, v_c = {v_c:.1f} m/s",
              injection="apogee", v_f=v_f, v_c=v_c)

    shape = shape_from_state(final.state, c)
    if shape.eccentricity < th.circular_eccentricity:
        expected = final.thrust / (final.state.mass * r_f)
        rel = abs(accel_fd - expected) / expected
        check("terminal_theta_accel", rel < th.theta_accel_rel,
              f"d2(theta)/dt2 at t_f = {accel_fd:.6e}, T/(m r) = {expected:.6e} rad/s^2",
              rel, th.theta_accel_rel, severity=Severity.WARNING, theta_accel=accel_fd, expected=expected)
    return issues


# =============================================================================
# Report
# =============================================================================

@dataclass
class PmpReport:
    source: str
    omega_sign: int
    max_h: float
    max_h0: float
    max_phi: float
    max_rate_mismatch: Optional[float] = None
    max_pv_dev: Optional[float] = None
    max_psi_dev: Optional[float] = None
    costate_dev: Optional[float] = None
    max_phi_propagated: Optional[float] = None
    issues: List[Issue] = field(default_factory=list)
    p0_note: str = P0_NOTE

    @property
    def passed(self) -> bool:
        return not any(i.severity == Severity.ERROR for i in self.issues)

    @property
    def terminal(self) -> Dict[str, Any]:
        data = {"applicable": not any(i.type == "terminal" for i in self.issues)}
        for issue in self.issues:
            if issue.type.startswith("terminal_") or issue.type == "injection_direction":
                data[issue.type] = {"value": issue.value, "passed": issue.severity == Severity.PASS,
                                    **issue.details}
        return data

    @property
    def diagnostics(self) -> Dict[str, Any]:
        """Measured distance from a stationary arc, reported without gating."""
        return {i.type: {"value": i.value, "reference": i.threshold, **i.details}
                for i in self.issues if i.details.get("diagnostic")}

    def summary(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "omega_sign": self.omega_sign,
            "max_H_norm": self.max_h,
            "max_H0_norm": self.max_h0,
            "max_Phi_m": self.max_phi,
            "max_rate_mismatch": self.max_rate_mismatch,
            "max_pv_norm_dev": self.max_pv_dev,
            "max_psi_dev": self.max_psi_dev,
            "costate_max_rel_dev": self.costate_dev,
            "max_Phi_m_propagated": self.max_phi_propagated,
            "terminal": self.terminal,
            "diagnostics": self.diagnostics,
            "p0_note": self.p0_note,
        }

    def generate_report(self, format: str = "console") -> str:
        """Generate report in specified format."""
        if format == "json":
            return self._report_json()
        elif format == "markdown":
            return self._report_markdown()
        else:
            return self._report_console()

    def _counts(self):
        errors = [i for i in self.issues if i.severity == Severity.ERROR]
        warnings = [i for i in self.issues if i.severity == Severity.WARNING]
        return errors, warnings

    def _report_console(self) -> str:
        errors, warnings = self._counts()
        lines = [
            f"\nOptimality Analysis: {self.source}",
            "=" * 60,
            "",
            f"Found {len(errors)} error(s), {len(warnings)} warning(s)  (omega sign {self.omega_sign:+d})",
            "",
        ]
        icons = {Severity.PASS: "ok", Severity.INFO: "..", Severity.WARNING: "--", Severity.ERROR: "!!"}
        for issue in self.issues:
            lines.append(f"[{icons[issue.severity]}] {issue.type}")
            lines.append(f"    {issue.description}")
        lines.append("")
        lines.append(self.p0_note)
        return "\n".join(lines)

    def _report_json(self) -> str:
        errors, warnings = self._counts()
        return json.dumps({
            "source": self.source,
            "errors": len(errors),
            "warnings": len(warnings),
            "summary": self.summary(),
            "issues": [
                {
                    "type": i.type,
                    "severity": i.severity.value,
                    "description": i.description,
                    "value": i.value,
                    "threshold": i.threshold,
                    "details": i.details,
                }
                for i in self.issues
            ],
        }, indent=2, sort_keys=True)

    def _report_markdown(self) -> str:
        lines = [
            f"# Optimality Analysis: {self.source}",
            "",
            f"**Omega sign:** {self.omega_sign:+d}",
            "",
            "| Check | Result | Value | Threshold |",
            "|-------|--------|-------|-----------|",
        ]
        for i in self.issues:
            value = "" if i.value is None else f"{i.value:.3e}"
            threshold = "" if i.threshold is None else f"{i.threshold:.1e}"
            lines.append(f"| {i.type} | {i.severity.value} | {value} | {threshold} |")
        lines += ["", self.p0_note]
        return "\n".join(lines)

    def exit_code(self) -> int:
        """Return exit code based on issues found."""
        if any(i.severity == Severity.ERROR for i in self.issues):
            return 2
        if any(i.severity == Severity.WARNING for i in self.issues):
            return 1
        return 0


# =============================================================================
# Checker
# =============================================================================

class PmpChecker:
    def __init__(self, trajectory: Trajectory, thresholds: Optional[Thresholds] = None,
                 source: str = "trajectory"):
        self.trajectory = trajectory
        self.thresholds = thresholds or Thresholds()
        self.source = source

    def analyze(self) -> PmpReport:
        """Run every check and return the report.

        Only the pointwise conditions and the injection geometry gate the
        result. The distance from a stationary arc is measured and reported
        as INFO once it exceeds its reference.
        """
        traj, th = self.trajectory, self.thresholds
        prop, c = traj.propulsion, traj.constants
        sign = resolve_omega_sign(traj.points, prop, c)
        terms = [hamiltonian_at(p, prop, c, sign) for p in traj.points]
        max_h = max(abs(t.H_norm) for t in terms)
        max_h0 = max(abs(t.H0_norm) for t in terms)
        max_phi = max(abs(t.Phi_m) for t in terms)
        report = PmpReport(self.source, sign, max_h, max_h0, max_phi)

        def check(name, value, threshold, description):
            severity = Severity.PASS if value < threshold else Severity.ERROR
            report.issues.append(Issue(name, severity, f"{description} = {value:.3e} (< {threshold:.0e})",
                                       value, threshold))

        def diagnose(name, value, reference, description, **details):
            severity = Severity.PASS if value < reference else Severity.INFO
            report.issues.append(Issue(name, severity,
                                       f"{description} = {value:.3e} (stationary arc < {reference:.0e})",
                                       value, reference, {"diagnostic": True, **details}))

        check("hamiltonian", max_h0, th.hamiltonian, "max |H0| r^2/mu")
        check("switching_function", max_phi, th.switching, "max |Phi| m")

        opposite = max(abs(hamiltonian_at(p, prop, c, -sign).H0_norm) for p in traj.points)
        report.issues.append(Issue(
            "omega_sign", Severity.INFO,
            f"H0 vanishes with p_r = {sign:+d} * omega (-cos(theta - phi), sin(theta - phi)); "
            f"the opposite sign leaves max |H0| r^2/mu = {opposite:.3e}",
            opposite, None, {"diagnostic": True, "sign": sign}))

        mismatches = [(p.time, rate_mismatch_at(p, c, traj.steering_offset))
                      for p in traj.points if math.isfinite(p.omega)]
        if mismatches:
            t_worst, worst = max(mismatches, key=lambda m: abs(m[1]))
            report.max_rate_mismatch = abs(worst)
            diagnose("rate_consistency", abs(worst), th.rate,
                     "max |(dphi/dt - dtheta/dt) / omega - 1|", at_time_s=t_worst,
                     final=abs(mismatches[-1][1]))

        if traj.solution is None or traj.profile is None:
            report.issues.append(Issue("costate_propagation", Severity.INFO,
                                       "No dense solution: costate propagation inapplicable"))
        else:
            history = propagate_costates(traj, sign, th.costate_rtol)
            report.costate_dev = history.max_deviation
            report.max_pv_dev = history.pv_norm_dev
            report.max_psi_dev = history.psi_dev
            report.max_phi_propagated = history.phi_m
            diagnose("costate_ode", history.max_deviation, th.costate, "max costate relative deviation")
            diagnose("pv_norm", history.pv_norm_dev, th.pv_norm, "max ||p_v| - 1|")
            diagnose("mass_costate", history.psi_dev, th.psi, "max |Psi/Psi0 - 1|")
            diagnose("switching_propagated", history.phi_m, th.switching_propagated,
                     "max |Phi| m from propagated costates")

        report.issues.extend(terminal_checks(traj, th))
        logger.info("Optimality checks on %s: %s", self.source, "pass" if report.passed else "FAIL")
        if report.max_rate_mismatch is not None and report.max_rate_mismatch > th.rate:
            logger.info("Flown thrust direction rate departs from omega by up to %.2f%%",
                        100.0 * report.max_rate_mismatch)
        return report


# =============================================================================
# Trajectory CSV
# =============================================================================

def load_trajectory_csv(path: Path, propulsion: Propulsion, c: Constants = EARTH) -> Trajectory:
    """Trajectory rebuilt from an exported CSV (no dense solution, no profile)."""
    points = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            t = float(row["t_s"])
            polar = PolarKinematics(float(row["r_m"]), float(row["v_ms"]),
                                    math.radians(float(row["gamma_deg"])), math.radians(float(row["phi_deg"])))
            state = polar_to_cartesian(polar, float(row["mass_kg"]), t)
            points.append(TrajectoryPoint(t, state, polar, math.radians(float(row["theta_deg"])),
                                          float(row["omega_rads"]), float(row["thrust_N"]),
                                          float(row["dVg_ms"]), float(row["dVt_ms"]), math.nan))
    if not points:
        raise PropagationError(f"No samples in {path}", reason="empty_trajectory")

    injection = None
    if len(points) > 1 and abs(points[-1].polar.gamma) < 1e-6:
        before = points[-2].polar.gamma
        injection = "perigee" if before < 0 else "apogee" if before > 0 else None
    mode = InjectionMode(injection) if injection else InjectionMode.FIRST
    return Trajectory(points, None, propulsion, c, mode, injection)


def verify_scenario(scenario) -> PmpReport:
    """Solve ``scenario`` and check the converged trajectory."""
    from solver import solve

    result = solve(replace(scenario, settings=replace(scenario.settings, verify=False)))
    return PmpChecker(result.trajectory, source=scenario.name).analyze()


def verify_trajectory_csv(path: Path, scenario) -> PmpReport:
    """Pointwise and terminal checks on an exported trajectory.

    The engine and constants come from ``scenario``.
    """
    trajectory = load_trajectory_csv(path, scenario.propulsion, scenario.constants)
    return PmpChecker(trajectory, source=path.name).analyze()


def verify_target(target: str) -> PmpReport:
    """Report for a trajectory CSV (default scenario engine) or a scenario file or preset."""
    from scenario import resolve_scenario

    if target.endswith(".csv"):
        return verify_trajectory_csv(Path(target), resolve_scenario(None))
    return verify_scenario(resolve_scenario(target))


def main():
    parser = argparse.ArgumentParser(
        description="Check the optimality conditions along an ascent trajectory",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exit codes:
  0 - All checks pass
  1 - Warnings only
  2 - Errors found
  3 - Script error
        """
    )
    parser.add_argument("target", help="Scenario file, preset name or trajectory CSV")
    parser.add_argument("--json", action="store_true", help="Output as JSON")
    parser.add_argument("--markdown", action="store_true", help="Output as Markdown")
    parser.add_argument("--strict", action="store_true", help="Treat warnings as errors")

    args = parser.parse_args()

    try:
        report = verify_target(args.target)

        if args.json:
            print(report.generate_report("json"))
        elif args.markdown:
            print(report.generate_report("markdown"))
        else:
            print(report.generate_report("console"))

        exit_code = report.exit_code()
        if args.strict and exit_code == 1:
            exit_code = 2
        sys.exit(exit_code)

    except AscentError as e:
        print(f"Error [{e.reason}]: {e}", file=sys.stderr)
        sys.exit(1 if isinstance(e, (ScenarioError, OrbitInputError)) else 2)
    except Exception as e:
        print(f"Error: {e}", file=sys.stderr)
        import traceback
        traceback.print_exc()
        sys.exit(3)


if __name__ == "__main__":
    main()
