#!/usr/bin/env python3
"""Exceptions for AscentCraft.

Every error carries a short machine-readable ``reason`` so the CLI can
report it and pick an exit code without parsing messages.
"""

from typing import Any, Dict, Optional


class AscentError(Exception):
    """Base class for all AscentCraft errors."""

    reason = "ascent_error"

    def __init__(self, message: str, reason: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        if reason:
            self.reason = reason
        self.details = details or {}


class OrbitInputError(AscentError, ValueError):
    """Orbit definition that cannot describe a closed target orbit."""

    reason = "invalid_orbit"


class SteeringDomainError(AscentError, ValueError):
    """Kinematic conditions outside the closed-loop steering domain."""

    reason = "steering_domain"


class InvalidProfileError(AscentError, ValueError):
    """Thrust profile that is not strictly positive on the burn."""

    reason = "invalid_profile"


class InfeasibleProfileError(AscentError):
    """Propellant runs out before the injection event."""

    reason = "mass_depleted"


class PropagationError(AscentError):
    """Integrator failure or no injection event within max_time."""

    reason = "propagation_failed"


class ConvergenceError(AscentError):
    """Newton iterations did not reach the residual tolerance."""

    reason = "not_converged"

    def __init__(self, message: str, reason: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None, best=None):
        super().__init__(message, reason, details)
        self.best = best


class SingularJacobianError(ConvergenceError):
    """Shooting Jacobian cannot be inverted at the current iterate."""

    reason = "singular_jacobian"


class ScenarioError(AscentError, ValueError):
    """Scenario file or preset that fails validation."""

    reason = "invalid_scenario"
