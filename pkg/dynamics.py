#!/usr/bin/env python3
"""
Thrust profiles, closed-loop equations of motion and propagation for AscentCraft.

The state vector integrated by ``propagate`` is

    [x, y, vx, vy, m, dV_gravity, dV_aoa, dV_impulse]

The last three entries are loss quadratures integrated alongside the motion:
int g sin(gamma) dt, int T/m (1 - cos(theta - gamma)) dt and int T/m dt.

Propagation steps a DOP853 integrator one accepted step at a time, watches
sin(gamma) for the injection crossing required by the InjectionMode, and
locates the crossing on the step's dense output. Bilevel thrust switches are
step boundaries: the integrator restarts there.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import DOP853, OdeSolution
from scipy.optimize import brentq

from errors import (
    InfeasibleProfileError,
    InvalidProfileError,
    PropagationError,
    ScenarioError,
    SteeringDomainError,
)
from orbital import (
    EARTH,
    Constants,
    PlanarState,
    PolarKinematics,
    cartesian_to_polar,
)
from steering import angular_rate, solve_pitch, thrust_direction

logger = logging.getLogger(__name__)

STATE_SIZE = 8


# =============================================================================
# Thrust Profiles
# =============================================================================

@dataclass(frozen=True)
class LinearThrust:
    """T(t) = T1 + (t - t0) T2."""
    T1: float  # N
    T2: float  # N/s
    kind = "linear"

    def at(self, t: float, t0: float = 0.0) -> float:
        return self.T1 + (t - t0) * self.T2

    def switch_times(self, t0: float = 0.0) -> List[float]:
        return []

    @property
    def params(self) -> Tuple[float, float]:
        return (self.T1, self.T2)

    def with_params(self, params) -> "LinearThrust":
        return LinearThrust(float(params[0]), float(params[1]))

    def min_thrust(self, duration: float) -> float:
        """Smallest thrust over [t0, t0 + duration]."""
        return min(self.T1, self.T1 + duration * self.T2)


@dataclass(frozen=True)
class BilevelThrust:
    """T1 before the switching date t1, T2 from t1 on (t1 counted from ignition)."""
    T1: float  # N
    T2: float  # N
    t1: float  # s after t0
    kind = "bilevel"

    def at(self, t: float, t0: float = 0.0) -> float:
        return self.T1 if t - t0 < self.t1 else self.T2

    def switch_times(self, t0: float = 0.0) -> List[float]:
        return [t0 + self.t1] if self.t1 > 0 else []

    @property
    def params(self) -> Tuple[float, float]:
        return (self.T1, self.T2)

    def with_params(self, params) -> "BilevelThrust":
        return BilevelThrust(float(params[0]), float(params[1]), self.t1)

    def min_thrust(self, duration: float) -> float:
        return min(self.T1, self.T2) if duration > self.t1 else self.T1


ThrustProfile = Union[LinearThrust, BilevelThrust]


def thrust_at(profile: ThrustProfile, t: float, t0: float = 0.0) -> float:
    """Thrust level in N at date t for an ignition at t0."""
    return profile.at(t, t0)


# =============================================================================
# Configuration Types
# =============================================================================

@dataclass(frozen=True)
class Propulsion:
    """Engine exhaust velocity and the dry mass that must remain."""
    v_e: float  # m/s
    dry_mass: float = 0.0  # kg

    def __post_init__(self):
        if self.v_e <= 0:
            raise InvalidProfileError(f"Exhaust velocity must be positive, got {self.v_e}",
                                      reason="invalid_propulsion")

    @classmethod
    def from_isp(cls, isp: float, g0: float = EARTH.g0, dry_mass: float = 0.0) -> "Propulsion":
        return cls(isp * g0, dry_mass)


@dataclass(frozen=True)
class IntegratorConfig:
    """Integrator tolerances and limits."""
    rel_tol: float = 1e-10
    abs_tol: float = 1e-6
    max_step: float = 10.0  # s
    event_tol: float = 1e-10  # rad on gamma
    max_time: float = 5000.0  # s after t0
    sample_step: float = 1.0  # s, uniform samples in the exported trajectory

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "event_tol", "max_time", "sample_step"):
            if not getattr(self, name) > 0:
                raise ScenarioError(f"IntegratorConfig.{name} must be positive", reason="invalid_integrator")

    def refined(self, factor: float = 0.5) -> "IntegratorConfig":
        """Same settings with rel_tol and abs_tol scaled by ``factor``."""
        return IntegratorConfig(self.rel_tol * factor, self.abs_tol * factor, self.max_step,
                                self.event_tol, self.max_time, self.sample_step)


class InjectionMode(Enum):
    PERIGEE = "perigee"  # upward gamma zero after a strictly negative excursion
    APOGEE = "apogee"  # gamma decreasing through zero
    FIRST = "first"  # first zero either way, classified by direction


# =============================================================================
# Trajectory
# =============================================================================

@dataclass(frozen=True)
class TrajectoryPoint:
    """One sample with its derived guidance and loss quantities."""
    time: float
    state: PlanarState
    polar: PolarKinematics
    theta: float  # rad
    omega: float  # rad/s, nan outside the steering domain
    thrust: float  # N
    dv_gravity: float  # m/s
    dv_aoa: float  # m/s
    dv_impulse: float  # m/s

    @property
    def aoa(self) -> float:
        """Angle of attack theta - gamma."""
        return self.theta - self.polar.gamma


@dataclass
class Trajectory:
    """Time-ordered samples from ignition to injection, plus the dense solution."""
    points: List[TrajectoryPoint]
    profile: ThrustProfile
    propulsion: Propulsion
    constants: Constants = EARTH
    mode: InjectionMode = InjectionMode.PERIGEE
    injection: Optional[str] = None  # "perigee" | "apogee" | None when not event-terminated
    solution: Optional[OdeSolution] = None
    steering_offset: float = 0.0
    step_times: List[float] = field(default_factory=list)

    @property
    def initial(self) -> TrajectoryPoint:
        return self.points[0]

    @property
    def final(self) -> TrajectoryPoint:
        return self.points[-1]

    @property
    def t0(self) -> float:
        return self.points[0].time

    @property
    def duration(self) -> float:
        return self.final.time - self.t0

    @property
    def times(self) -> np.ndarray:
        return np.array([p.time for p in self.points])

    @property
    def gammas(self) -> np.ndarray:
        return np.array([p.polar.gamma for p in self.points])

    @property
    def min_gamma(self) -> float:
        return float(self.gammas.min())

    @property
    def angular_range(self) -> float:
        """Longitude swept from ignition to injection, rad."""
        phis = np.unwrap([p.polar.phi for p in self.points])
        return float(phis[-1] - phis[0])

    def state_vector(self, t) -> np.ndarray:
        """Integrated state vector(s) at date(s) t from the dense solution."""
        if self.solution is None:
            raise PropagationError("Trajectory has no dense solution", reason="no_dense_output")
        return self.solution(t)

    def point_at(self, t: float) -> TrajectoryPoint:
        return make_point(t, self.state_vector(t), self.profile, self.constants,
                          self.t0, self.steering_offset)


# =============================================================================
# Equations of Motion
# =============================================================================

def pitch_for_state(state: PlanarState, c: Constants = EARTH, steering_offset: float = 0.0) -> Tuple[float, PolarKinematics]:
    """Closed-loop pitch (plus optional offset) and polar kinematics of a state."""
    polar = cartesian_to_polar(state)
    return solve_pitch(polar.r, polar.v, polar.gamma, c) + steering_offset, polar


def equations_of_motion(state: PlanarState, thrust: float, prop: Propulsion,
                        c: Constants = EARTH, steering_offset: float = 0.0) -> np.ndarray:
    """[r_dot, v_dot, m_dot] for a given thrust level under the closed-loop pitch.

    v_dot = -(mu/r^3) r + (T/m) u(theta, phi), m_dot = -T / v_e.
    """
    theta, polar = pitch_for_state(state, c, steering_offset)
    gravity = -c.mu / polar.r ** 3 * state.position
    accel = gravity + thrust / state.mass * thrust_direction(theta, polar.phi)
    return np.array([state.velocity[0], state.velocity[1], accel[0], accel[1], -thrust / prop.v_e])


def rhs(state: PlanarState, profile: ThrustProfile, prop: Propulsion, c: Constants = EARTH,
        t0: float = 0.0, steering_offset: float = 0.0) -> np.ndarray:
    """State derivative [x_dot, y_dot, vx_dot, vy_dot, m_dot] at ``state.time``."""
    return equations_of_motion(state, thrust_at(profile, state.time, t0), prop, c, steering_offset)


def state_derivative(t: float, y: np.ndarray, profile: ThrustProfile, prop: Propulsion,
                     c: Constants, t0: float, steering_offset: float = 0.0) -> np.ndarray:
    """Derivative of the full integrated vector, loss quadratures included.

    Written with scalar math: this is evaluated at every integrator stage.
    """
    x, yy, vx, vy, m = y[0], y[1], y[2], y[3], y[4]
    thrust = profile.at(t, t0)
    if not thrust > 0:
        raise InvalidProfileError(f"Thrust {thrust:.6g} N is not positive at t={t:.3f} s",
                                  details={"time": t, "thrust": thrust})
    if not m > prop.dry_mass:
        raise InfeasibleProfileError(f"Mass depleted at t={t:.3f} s", details={"time": t})

    r = math.hypot(x, yy)
    v = math.hypot(vx, vy)
    radial = (x * vx + yy * vy) / r
    horizontal = (x * vy - yy * vx) / r
    gamma = math.atan2(radial, horizontal)
    phi = math.atan2(yy, x)
    theta = solve_pitch(r, v, gamma, c) + steering_offset

    mu_r3 = c.mu / r ** 3
    accel = thrust / m
    return np.array([
        vx,
        vy,
        -mu_r3 * x + accel * math.sin(theta - phi),
        -mu_r3 * yy + accel * math.cos(theta - phi),
        -thrust / prop.v_e,
        c.mu / (r * r) * radial / v,
        accel * (1.0 - math.cos(theta - gamma)),
        accel,
    ])


def make_point(t: float, y: np.ndarray, profile: ThrustProfile, c: Constants,
               t0: float, steering_offset: float = 0.0) -> TrajectoryPoint:
    """Trajectory sample from an integrated vector."""
    state = PlanarState(np.array(y[0:2]), np.array(y[2:4]), float(y[4]), float(t))
    theta, polar = pitch_for_state(state, c, steering_offset)
    try:
        omega = angular_rate(polar.r, theta, c)
    except SteeringDomainError:
        omega = math.nan
    return TrajectoryPoint(float(t), state, polar, theta, omega, thrust_at(profile, t, t0),
                           float(y[5]), float(y[6]), float(y[7]))


def _sin_gamma(y: np.ndarray) -> float:
    return (y[0] * y[2] + y[1] * y[3]) / (math.hypot(y[0], y[1]) * math.hypot(y[2], y[3]))


# =============================================================================
# Propagation
# =============================================================================

def _crossing(mode: InjectionMode, g_old: float, g_new: float, went_negative: bool) -> Optional[str]:
    """Injection kind if this step crosses gamma = 0 as ``mode`` requires."""
    upward = g_old < 0.0 <= g_new
    downward = g_old > 0.0 >= g_new
    if mode is InjectionMode.PERIGEE:
        return "perigee" if upward and went_negative else None
    if mode is InjectionMode.APOGEE:
        return "apogee" if downward else None
    if upward:
        return "perigee"
    return "apogee" if downward else None


def propagate(initial: PlanarState, profile: ThrustProfile, prop: Propulsion,
              mode: InjectionMode = InjectionMode.PERIGEE, cfg: Optional[IntegratorConfig] = None,
              c: Constants = EARTH, steering_offset: float = 0.0) -> Trajectory:
    """Propagate the closed loop from ``initial`` to the gamma = 0 injection.

    Raises InvalidProfileError on non-positive thrust, InfeasibleProfileError
    when the propellant runs out and PropagationError when no injection
    occurs within ``cfg.max_time``.
    """
    cfg = cfg or IntegratorConfig()
    polar0 = cartesian_to_polar(initial)
    if not abs(polar0.gamma) < 0.5 * math.pi:
        raise SteeringDomainError(f"Initial flight path angle {polar0.gamma} rad is vertical")

    t0 = initial.time
    t_end = t0 + cfg.max_time
    fun = partial(state_derivative, profile=profile, prop=prop, c=c, t0=t0, steering_offset=steering_offset)
    y = np.concatenate([initial.position, initial.velocity, [initial.mass, 0.0, 0.0, 0.0]])

    boundaries = [tb for tb in profile.switch_times(t0) if t0 < tb < t_end] + [t_end]
    ts: List[float] = [t0]
    interpolants = []
    went_negative = polar0.gamma < 0
    injection = None
    t_start = t0

    for bound in boundaries:
        solver = DOP853(fun, t_start, y, bound, max_step=cfg.max_step, rtol=cfg.rel_tol, atol=cfg.abs_tol)
        while solver.status == "running":
            message = solver.step()
            if solver.status == "failed":
                if solver.y[4] < prop.dry_mass + 1e-3 * initial.mass:
                    raise InfeasibleProfileError(f"Mass depleted near t={solver.t:.3f} s ({message})")
                raise PropagationError(f"Integrator failed at t={solver.t:.3f} s: {message}")

            dense = solver.dense_output()
            g_old, g_new = _sin_gamma(dense(solver.t_old)), _sin_gamma(solver.y)
            injection = _crossing(mode, g_old, g_new, went_negative)
            if injection:
                t_event = solver.t if g_new == 0.0 else brentq(
                    lambda t: _sin_gamma(dense(t)), solver.t_old, solver.t, xtol=1e-12, rtol=4.0 * np.finfo(float).eps)
                interpolants.append(dense)
                ts.append(t_event)
                break
            went_negative = went_negative or g_new < 0.0
            interpolants.append(dense)
            ts.append(solver.t)
        if injection:
            break
        t_start, y = solver.t, solver.y
    else:
        raise PropagationError(f"No {mode.value} injection within {cfg.max_time:.0f} s",
                               reason="max_time_exceeded")

    solution = OdeSolution(np.array(ts), interpolants)
    t_f = ts[-1]
    sample_times = np.union1d(np.array(ts), np.arange(t0, t_f, cfg.sample_step))
    sample_times = sample_times[sample_times <= t_f]
    states = solution(sample_times)
    points = [make_point(t, states[:, k], profile, c, t0, steering_offset) for k, t in enumerate(sample_times)]

    gamma_f = points[-1].polar.gamma
    if abs(gamma_f) >= cfg.event_tol:
        raise PropagationError(f"Injection event located with |gamma| = {abs(gamma_f):.3e} rad",
                               reason="event_tolerance")

    logger.debug("Propagated %s injection: t_f=%.3f s, m_f=%.3f kg, %d steps",
                 injection, t_f - t0, points[-1].state.mass, len(ts) - 1)
    return Trajectory(points, profile, prop, c, mode, injection, solution, steering_offset, ts)
