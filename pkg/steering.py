#!/usr/bin/env python3
"""
Closed-loop optimal steering for AscentCraft.

The pitch angle theta (thrust direction above the local horizontal) follows
from the current kinematics (r, v, gamma) through the implicit equation

    sin(gamma - theta) = (v_c / v) sin(theta) / sqrt(1 - 3 sin^2(theta))

with v_c = sqrt(mu/r). The root is taken on the branch with the sign of
gamma and |theta| < asin(1/sqrt(3)), which contains theta = gamma/2 in the
small-angle limit. The thrust direction angular rate omega, its derivative
and the costates follow in closed form.

Sign convention: omega is the counter-clockwise inertial rate of the thrust
direction, omega = dphi/dt - dtheta/dt, positive on prograde ascent.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from errors import SteeringDomainError
from orbital import EARTH, Constants


# =============================================================================
# Constants
# =============================================================================

THETA_MAX = math.asin(1.0 / math.sqrt(3.0))  # omega is real only below this

_RADICAND_FLOOR = 1e-300
_XTOL = 1e-18
_RTOL = 4.0 * np.finfo(float).eps
_MAX_ITER = 200


# =============================================================================
# Types
# =============================================================================

@dataclass(frozen=True)
class SteeringSolution:
    """Pitch angle with the thrust direction angular rate and its derivative."""
    theta: float  # rad
    omega: float  # rad/s
    omega_dot: float  # rad/s^2


@dataclass(frozen=True)
class CostateReconstruction:
    """Costates in the normalization |p_v| = 1, p_m = v_e / m."""
    p_r: np.ndarray
    p_v: np.ndarray
    p_m: float


# =============================================================================
# Pitch Law
# =============================================================================

def max_pitch() -> float:
    """Largest |theta| with a real angular rate, asin(1/sqrt(3))."""
    return THETA_MAX


def pitch_residual(theta: float, r: float, v: float, gamma: float, c: Constants = EARTH) -> float:
    """f(theta) = sin(gamma - theta) - (v_c/v) sin(theta) / sqrt(1 - 3 sin^2(theta))."""
    s = math.sin(theta)
    radicand = max(1.0 - 3.0 * s * s, _RADICAND_FLOOR)
    return math.sin(gamma - theta) - math.sqrt(c.mu / r) / v * s / math.sqrt(radicand)


def solve_pitch(r: float, v: float, gamma: float, c: Constants = EARTH) -> float:
    """Pitch angle theta solving the closed-loop equation for (r, v, gamma).

    f(0) = sin(gamma) and f diverges with the opposite sign at THETA_MAX, and
    f is monotone on the bracket, so the root exists and is unique. Brent's
    method (bisection safeguarding secant steps) refines it to round-off.
    """
    if r <= 0 or v <= 0:
        raise SteeringDomainError(f"Pitch law needs r > 0 and v > 0 (r={r}, v={v})")
    if not abs(gamma) < 0.5 * math.pi:
        raise SteeringDomainError(f"Pitch law is singular at vertical flight (gamma={gamma})")
    if gamma == 0.0:
        return 0.0

    # odd symmetry: theta(-gamma) = -theta(gamma)
    theta = brentq(pitch_residual, 0.0, THETA_MAX, args=(r, v, abs(gamma), c),
                   xtol=_XTOL, rtol=_RTOL, maxiter=_MAX_ITER)
    return math.copysign(theta, gamma)


def angular_rate(r: float, theta: float, c: Constants = EARTH) -> float:
    """omega = sqrt(mu/r^3 (1 - 3 sin^2(theta))), the rate dphi/dt - dtheta/dt."""
    radicand = 1.0 - 3.0 * math.sin(theta) ** 2
    if radicand < -1e-12:
        raise SteeringDomainError(f"sin^2(theta) > 1/3 at theta={theta}: angular rate is not real")
    return math.sqrt(c.mu / r ** 3 * max(radicand, 0.0))


def angular_rate_derivative(r: float, theta: float, c: Constants = EARTH) -> float:
    """d(omega)/dt = -(3 mu / r^3) sin(theta) cos(theta)."""
    return -3.0 * c.mu / r ** 3 * math.sin(theta) * math.cos(theta)


def pitch_rate(r: float, v: float, gamma: float, accel: float, c: Constants = EARTH,
               steering_offset: float = 0.0) -> float:
    """d(theta)/dt of the closed-loop pitch along the powered flight.

    Implicit differentiation of f(theta; r, v, gamma) = 0 with

        r_dot = v sin(gamma)
        v_dot = a cos(theta' - gamma) - g sin(gamma)
        gamma_dot = (a / v) sin(theta' - gamma) + (v/r - g/v) cos(gamma)

    where a = T/m, g = mu/r^2 and theta' is the flown pitch (law plus
    ``steering_offset``). At gamma = 0 this reduces to (v - v_c)/r.
    """
    theta = solve_pitch(r, v, gamma, c)
    flown = theta + steering_offset
    g = c.mu / r ** 2
    v_c = math.sqrt(c.mu / r)
    s, cos_t = math.sin(theta), math.cos(theta)
    radicand = 1.0 - 3.0 * s * s
    if radicand <= 0.0:
        raise SteeringDomainError(f"Pitch rate undefined at theta={theta}")
    ratio = s / math.sqrt(radicand)

    r_dot = v * math.sin(gamma)
    v_dot = accel * math.cos(flown - gamma) - g * math.sin(gamma)
    gamma_dot = accel / v * math.sin(flown - gamma) + (v / r - g / v) * math.cos(gamma)

    f_theta = -math.cos(gamma - theta) - v_c / v * cos_t / radicand ** 1.5
    f_gamma = math.cos(gamma - theta)
    f_v = v_c / (v * v) * ratio
    f_r = v_c / (2.0 * r * v) * ratio
    return -(f_r * r_dot + f_v * v_dot + f_gamma * gamma_dot) / f_theta


def steer(r: float, v: float, gamma: float, c: Constants = EARTH) -> SteeringSolution:
    """Pitch angle, angular rate and its derivative for the current kinematics."""
    theta = solve_pitch(r, v, gamma, c)
    return SteeringSolution(theta, angular_rate(r, theta, c), angular_rate_derivative(r, theta, c))


# =============================================================================
# Thrust Direction and Costates
# =============================================================================

def thrust_direction(theta: float, phi: float) -> np.ndarray:
    """Unit thrust vector at pitch theta above the local horizontal at longitude phi."""
    return np.array([math.sin(theta - phi), math.cos(theta - phi)])


def reconstruct_costates(theta: float, phi: float, omega: float, mass: float, v_e: float) -> CostateReconstruction:
    """Position, velocity and mass costates along the optimal trajectory.

    p_r = omega (-cos(theta - phi), sin(theta - phi)) and
    p_v = (sin(theta - phi), cos(theta - phi)), exactly as written for the
    closed-loop law; the caller chooses the sign of ``omega``. With |p_v| = 1
    the mass costate is v_e / m.
    """
    if mass <= 0 or v_e <= 0:
        raise SteeringDomainError(f"Costates need mass > 0 and v_e > 0 (mass={mass}, v_e={v_e})")
    alpha = theta - phi
    p_r = omega * np.array([-math.cos(alpha), math.sin(alpha)])
    p_v = np.array([math.sin(alpha), math.cos(alpha)])
    return CostateReconstruction(p_r, p_v, v_e / mass)
