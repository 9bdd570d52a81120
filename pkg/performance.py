#!/usr/bin/env python3
"""
Performance estimates and loss accounting for AscentCraft.

Pre-flight: the gravity loss of the optimal ascent is close to
(1/4) v_c gamma0^2 evaluated at the ignition radius, and the rocket equation
with the target perigee speed then gives the injected mass. These numbers
are estimates and never feed the solver.

Post-flight: the loss quadratures integrated with the trajectory give the
gravity and angle-of-attack losses, which close the impulse budget

    v_f - v_0 + dV_gravity + dV_aoa = v_e ln(m_0 / m_f).
"""

import math
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Optional

from orbital import EARTH, Constants, OrbitShape, apsis_speed, circular_speed
from steering import angular_rate, solve_pitch

if TYPE_CHECKING:
    from dynamics import Trajectory
    from solver import Scenario


# =============================================================================
# Types
# =============================================================================

@dataclass(frozen=True)
class LossBreakdown:
    """Velocity loss budget, estimated or accumulated."""
    dv_gravity: float  # m/s
    dv_aoa: float  # m/s
    dv_total_impulse: float  # m/s
    m_f_est: float  # kg
    velocity_gain: Optional[float] = None  # v_f - v_0, m/s

    @property
    def impulse_residual(self) -> Optional[float]:
        """v_f - v_0 + losses - total impulse; zero up to quadrature error."""
        if self.velocity_gain is None:
            return None
        return self.velocity_gain + self.dv_gravity + self.dv_aoa - self.dv_total_impulse

    def to_dict(self) -> dict:
        data = asdict(self)
        data["impulse_residual"] = self.impulse_residual
        return data


# =============================================================================
# Rocket Equation
# =============================================================================

def exhaust_velocity(isp: float, g0: float = EARTH.g0) -> float:
    """Exhaust velocity from specific impulse."""
    return isp * g0


def tsiolkovsky_final_mass(m0: float, delta_v: float, v_e: float) -> float:
    """m_f = m_0 exp(-dV / v_e)."""
    return m0 * math.exp(-delta_v / v_e)


# =============================================================================
# Estimates
# =============================================================================

def gravity_loss_estimate(r0: float, gamma0: float, c: Constants = EARTH) -> float:
    """Gravity loss estimate (1/4) sqrt(mu/r0) gamma0^2."""
    return 0.25 * circular_speed(r0, c) * gamma0 ** 2


def rate_gravity_loss_estimate(r0: float, v0: float, gamma0: float, c: Constants = EARTH) -> float:
    """Gravity loss from the thrust angular rates at ignition and injection.

    (2/3) r0 |omega_0 - omega_f| at constant radius r0, with theta_0 from the
    exact pitch law and theta_f = 0. Cross-check only: it agrees with
    ``gravity_loss_estimate`` in the small-angle limit.
    """
    theta0 = solve_pitch(r0, v0, gamma0, c)
    return 2.0 / 3.0 * r0 * abs(angular_rate(r0, theta0, c) - angular_rate(r0, 0.0, c))


def final_mass_estimate(m0: float, v0: float, target: OrbitShape, dv_g: float, v_e: float,
                        c: Constants = EARTH) -> float:
    """Injected mass for a perigee injection: m0 exp(-(dV_G + v_p - v0) / v_e)."""
    return tsiolkovsky_final_mass(m0, dv_g + apsis_speed(target, "perigee", c) - v0, v_e)


def estimate(scenario: "Scenario") -> LossBreakdown:
    """Pre-flight loss budget for a scenario."""
    c = scenario.constants
    polar = scenario.initial
    dv_g = gravity_loss_estimate(polar.r, polar.gamma, c)
    v_p = apsis_speed(scenario.target, "perigee", c)
    m_f = final_mass_estimate(scenario.initial_mass, polar.v, scenario.target, dv_g,
                              scenario.propulsion.v_e, c)
    return LossBreakdown(dv_g, 0.0, v_p - polar.v + dv_g, m_f)


# =============================================================================
# Accounting
# =============================================================================

def accumulate_losses(trajectory: "Trajectory") -> LossBreakdown:
    """Loss budget read from the trajectory's terminal quadratures."""
    first, last = trajectory.initial, trajectory.final
    impulse = last.dv_impulse - first.dv_impulse
    return LossBreakdown(
        dv_gravity=last.dv_gravity - first.dv_gravity,
        dv_aoa=last.dv_aoa - first.dv_aoa,
        dv_total_impulse=impulse,
        m_f_est=tsiolkovsky_final_mass(first.state.mass, impulse, trajectory.propulsion.v_e),
        velocity_gain=last.polar.v - first.polar.v,
    )
