#!/usr/bin/env python3
"""
Planar two-body mechanics for AscentCraft.

Conversions between Cartesian states and polar kinematics, and the orbit
shape descriptors (energy, angular momentum, apsides) used for targets and
residuals. Everything is SI: m, m/s, kg, s, rad. Altitudes are geometric
above the equatorial radius of a spherical Earth.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from errors import OrbitInputError


# =============================================================================
# Constants
# =============================================================================

@dataclass(frozen=True)
class Constants:
    """Central body constants."""
    mu: float = 3.986005e14  # m^3/s^2
    earth_radius: float = 6378137.0  # m
    g0: float = 9.80665  # m/s^2, thrust-to-weight and Isp conversions only

    def __post_init__(self):
        if self.mu <= 0 or self.earth_radius <= 0:
            raise OrbitInputError(
                f"Constants must be positive (mu={self.mu}, earth_radius={self.earth_radius})",
                reason="invalid_constants",
            )


EARTH = Constants()


# =============================================================================
# States
# =============================================================================

@dataclass(frozen=True)
class PlanarState:
    """Integrated state: position, velocity, mass and date."""
    position: np.ndarray  # m
    velocity: np.ndarray  # m/s
    mass: float  # kg
    time: float = 0.0  # s

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))
        if not np.hypot(*self.position) > 0:
            raise OrbitInputError("Position must be away from the central body", reason="zero_radius")
        if not self.mass > 0:
            raise OrbitInputError(f"Mass must be positive, got {self.mass}", reason="non_positive_mass")

    @property
    def radius(self) -> float:
        return math.hypot(self.position[0], self.position[1])

    @property
    def speed(self) -> float:
        return math.hypot(self.velocity[0], self.velocity[1])


@dataclass(frozen=True)
class PolarKinematics:
    """Radius, speed, flight path angle (above local horizontal) and longitude."""
    r: float  # m
    v: float  # m/s
    gamma: float  # rad
    phi: float = 0.0  # rad, from inertial x axis

    @property
    def altitude(self) -> float:
        """Altitude above the default Earth radius, m."""
        return self.r - EARTH.earth_radius


# =============================================================================
# Orbit Shape
# =============================================================================

@dataclass(frozen=True)
class OrbitShape:
    """Planar orbit shape from energy and angular momentum modulus.

    Derived quantities are filled by ``from_energy``. Apsis radii are only
    defined for closed orbits; ``periapsis`` also exists for open ones.
    """
    energy: float  # J/kg
    ang_momentum: float  # m^2/s
    semi_major: float = field(default=math.inf)  # m
    eccentricity: float = 0.0
    apoapsis: Optional[float] = None  # m
    periapsis: Optional[float] = None  # m

    @property
    def closed(self) -> bool:
        return self.energy < 0

    @property
    def degenerate(self) -> bool:
        """Radial orbit: zero angular momentum."""
        return self.ang_momentum == 0

    @classmethod
    def from_energy(cls, energy: float, ang_momentum: float, c: Constants = EARTH) -> "OrbitShape":
        h = abs(ang_momentum)
        e = math.sqrt(max(0.0, 1.0 + 2.0 * energy * h * h / (c.mu * c.mu)))
        if energy < 0:
            a = -c.mu / (2.0 * energy)
            return cls(energy, h, a, e, a * (1.0 + e), a * (1.0 - e))
        a = -c.mu / (2.0 * energy) if energy != 0 else math.inf
        rp = h * h / (c.mu * (1.0 + e)) if h > 0 else 0.0
        return cls(energy, h, a, e, None, rp)

    @classmethod
    def from_elements(cls, semi_major: float, eccentricity: float, c: Constants = EARTH) -> "OrbitShape":
        if semi_major <= 0 or not 0 <= eccentricity < 1:
            raise OrbitInputError(
                f"Closed orbit needs a > 0 and 0 <= e < 1 (a={semi_major}, e={eccentricity})",
                reason="open_orbit",
            )
        energy = -c.mu / (2.0 * semi_major)
        h = math.sqrt(c.mu * semi_major * (1.0 - eccentricity ** 2))
        return cls(energy, h, semi_major, eccentricity,
                   semi_major * (1.0 + eccentricity), semi_major * (1.0 - eccentricity))

    def altitudes_km(self, c: Constants = EARTH):
        """(apogee, perigee) altitudes in km, None where undefined."""
        to_km = lambda r: None if r is None else (r - c.earth_radius) / 1000.0  # noqa: E731
        return to_km(self.apoapsis), to_km(self.periapsis)


# =============================================================================
# Operations
# =============================================================================

def circular_speed(r: float, c: Constants = EARTH) -> float:
    """Circular orbit speed sqrt(mu/r)."""
    if r <= 0:
        raise OrbitInputError(f"Radius must be positive, got {r}", reason="zero_radius")
    return math.sqrt(c.mu / r)


def cartesian_to_polar(state: PlanarState) -> PolarKinematics:
    """Polar kinematics of a Cartesian state.

    gamma is taken from the radial and horizontal velocity components, so
    prograde states always have |gamma| < pi/2.
    """
    x, y = state.position
    vx, vy = state.velocity
    r = math.hypot(x, y)
    v = math.hypot(vx, vy)
    if v == 0:
        raise OrbitInputError("Flight path angle undefined at zero speed", reason="zero_speed")
    radial = (x * vx + y * vy) / r
    horizontal = (x * vy - y * vx) / r
    return PolarKinematics(r, v, math.atan2(radial, horizontal), math.atan2(y, x))


def polar_to_cartesian(polar: PolarKinematics, mass: float, time: float = 0.0) -> PlanarState:
    """Cartesian state from polar kinematics.

    r = r (cos phi, sin phi), v = v (-sin(phi - gamma), cos(phi - gamma)).
    """
    if polar.r <= 0:
        raise OrbitInputError(f"Radius must be positive, got {polar.r}", reason="zero_radius")
    position = polar.r * np.array([math.cos(polar.phi), math.sin(polar.phi)])
    velocity = polar.v * np.array([-math.sin(polar.phi - polar.gamma), math.cos(polar.phi - polar.gamma)])
    return PlanarState(position, velocity, mass, time)


def state_from_polar(altitude: float, speed: float, gamma: float, mass: float,
                     phi: float = 0.0, time: float = 0.0, c: Constants = EARTH) -> PlanarState:
    """Cartesian state from altitude (m), speed, flight path angle and longitude."""
    return polar_to_cartesian(PolarKinematics(c.earth_radius + altitude, speed, gamma, phi), mass, time)


def shape_from_state(state: Union[PlanarState, PolarKinematics], c: Constants = EARTH) -> OrbitShape:
    """Osculating orbit shape: w = v^2/2 - mu/r and h = |r x v|."""
    if isinstance(state, PlanarState):
        r, v = state.radius, state.speed
        h = abs(state.position[0] * state.velocity[1] - state.position[1] * state.velocity[0])
    else:
        r, v = state.r, state.v
        h = abs(r * v * math.cos(state.gamma))
    if r <= 0:
        raise OrbitInputError(f"Radius must be positive, got {r}", reason="zero_radius")
    return OrbitShape.from_energy(0.5 * v * v - c.mu / r, h, c)


def shape_from_apsides(apogee_alt: float, perigee_alt: float, c: Constants = EARTH) -> OrbitShape:
    """Orbit shape from apogee and perigee altitudes in metres.

    Negative perigee altitudes (sub-surface) are legal.
    """
    if apogee_alt < perigee_alt:
        raise OrbitInputError(
            f"Apogee altitude {apogee_alt} m is below perigee altitude {perigee_alt} m",
            reason="apogee_below_perigee",
        )
    ra = c.earth_radius + apogee_alt
    rp = c.earth_radius + perigee_alt
    if rp <= 0:
        raise OrbitInputError(f"Perigee radius must be positive, got {rp} m", reason="zero_radius")
    a = 0.5 * (ra + rp)
    e = (ra - rp) / (ra + rp)
    energy = -c.mu / (2.0 * a)
    h = math.sqrt(2.0 * c.mu * ra * rp / (ra + rp))
    return OrbitShape(energy, h, a, e, ra, rp)


def apsis_speed(shape: OrbitShape, which: str = "perigee", c: Constants = EARTH) -> float:
    """Speed at the perigee or apogee of a closed orbit, v = h / r."""
    if not shape.closed:
        raise OrbitInputError("Apsis speeds need a closed orbit (w < 0)", reason="open_orbit")
    if shape.degenerate:
        raise OrbitInputError("Apsis speed undefined for a radial orbit", reason="radial_orbit")
    if which == "perigee":
        return shape.ang_momentum / shape.periapsis
    if which == "apogee":
        return shape.ang_momentum / shape.apoapsis
    raise OrbitInputError(f"Unknown apsis '{which}' (perigee|apogee)", reason="unknown_apsis")


def speed_at_radius(shape: OrbitShape, r: float, c: Constants = EARTH) -> float:
    """Vis-viva speed on ``shape`` at radius r."""
    return math.sqrt(2.0 * (shape.energy + c.mu / r))
