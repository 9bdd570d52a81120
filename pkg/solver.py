#!/usr/bin/env python3
"""
Shooting solver for AscentCraft.

With the closed-loop pitch law the optimal ascent is fixed by the thrust
profile alone: the trajectory is propagated until the gamma = 0 injection
and the only unknowns left are the thrust parameters (T1, T2). They are
found by a damped Newton iteration on the terminal orbit residual, with a
forward finite-difference Jacobian. A bilevel switching date t1 is never a
Newton unknown: it is fixed per solve, swept, or searched in an outer 1-D
loop.
"""

import logging
import math
import multiprocessing
from dataclasses import asdict, dataclass, field, replace
from functools import partial
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from dynamics import (
    BilevelThrust,
    IntegratorConfig,
    InjectionMode,
    LinearThrust,
    Propulsion,
    ThrustProfile,
    Trajectory,
    propagate,
)
from errors import (
    AscentError,
    ConvergenceError,
    InfeasibleProfileError,
    ScenarioError,
    SingularJacobianError,
)
from orbital import EARTH, Constants, OrbitShape, PlanarState, PolarKinematics, polar_to_cartesian, shape_from_state
from performance import LossBreakdown, accumulate_losses

logger = logging.getLogger(__name__)

PROFILE_KINDS = ("linear", "bilevel")
RESIDUAL_KINDS = ("apsides", "energy")

# Thrust-to-weight multipliers tried in order when the seed cannot reach injection
SEED_MULTIPLIERS = (1.0, 0.8, 1.25, 0.6, 1.5)

# Absolute floors of the finite-difference steps (N for levels, N/s for the slope)
FD_FLOORS = {
    "linear": (1.0, 1e-3),
    "bilevel": (1.0, 1.0),
}


# =============================================================================
# Scenario
# =============================================================================

@dataclass(frozen=True)
class SolverSettings:
    """Newton iteration settings."""
    residual: str = "apsides"  # apsides (m) | energy (scaled w, h)
    residual_tol: float = 10.0  # m on each apsis radius
    scaled_tol: float = 1e-7  # relative on w and h
    max_iter: int = 40
    fd_step: float = 1e-3  # relative finite-difference step
    max_halvings: int = 10
    twr: float = 0.25  # seed thrust-to-weight ratio
    workers: int = 1
    verify: bool = True

    def __post_init__(self):
        if self.residual not in RESIDUAL_KINDS:
            raise ScenarioError(f"Unknown residual '{self.residual}' ({'|'.join(RESIDUAL_KINDS)})",
                                reason="invalid_value")
        for name in ("residual_tol", "scaled_tol", "max_iter", "fd_step", "twr", "workers"):
            if not getattr(self, name) > 0:
                raise ScenarioError(f"SolverSettings.{name} must be positive", reason="invalid_value")
        if self.max_halvings < 0:
            raise ScenarioError("SolverSettings.max_halvings must be non-negative", reason="invalid_value")

    @property
    def tolerance(self) -> float:
        return self.residual_tol if self.residual == "apsides" else self.scaled_tol


@dataclass(frozen=True)
class Scenario:
    """Fixed initial state, target orbit, engine and solver settings."""
    initial: PolarKinematics
    initial_mass: float  # kg
    target: OrbitShape
    propulsion: Propulsion
    profile_kind: str = "linear"
    t1: Optional[float] = None  # s after ignition, bilevel only
    t1_grid: Tuple[float, ...] = ()
    mode: InjectionMode = InjectionMode.PERIGEE
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    settings: SolverSettings = field(default_factory=SolverSettings)
    constants: Constants = EARTH
    t0: float = 0.0
    guess: Optional[Tuple[float, float]] = None
    name: str = "scenario"

    def __post_init__(self):
        if not self.target.closed:
            raise ScenarioError("Target orbit must be closed (w_f < 0)", reason="open_target")
        if not self.initial_mass > 0:
            raise ScenarioError(f"Initial mass must be positive, got {self.initial_mass}", reason="invalid_value")
        if self.profile_kind not in PROFILE_KINDS:
            raise ScenarioError(f"Unknown profile kind '{self.profile_kind}' ({'|'.join(PROFILE_KINDS)})",
                                reason="invalid_value")

    def initial_state(self) -> PlanarState:
        return polar_to_cartesian(self.initial, self.initial_mass, self.t0)

    def profile(self, params: Sequence[float]) -> ThrustProfile:
        """Thrust profile of this scenario's kind for parameters (T1, T2)."""
        if self.profile_kind == "linear":
            return LinearThrust(float(params[0]), float(params[1]))
        if self.t1 is None:
            raise ScenarioError("Bilevel profile needs a switching date t1", reason="missing_t1")
        return BilevelThrust(float(params[0]), float(params[1]), float(self.t1))


# =============================================================================
# Results
# =============================================================================

@dataclass
class SolveResult:
    """Converged thrust parameters with the resulting injection and losses."""
    scenario_name: str
    profile: ThrustProfile
    final_mass: float  # kg
    duration: float  # s, t_f - t0
    angular_range_deg: float
    losses: LossBreakdown
    iterations: int
    residual: Tuple[float, float]
    converged: bool
    history: List[Dict[str, Any]] = field(default_factory=list)
    pmp: Optional[Dict[str, Any]] = None
    trajectory: Optional[Trajectory] = field(default=None, repr=False)

    @property
    def params(self) -> Tuple[float, float]:
        return self.profile.params

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.residual))

    def to_dict(self) -> Dict[str, Any]:
        profile = {"kind": self.profile.kind, "T1_N": self.profile.T1}
        if self.profile.kind == "linear":
            profile["T2_Ns"] = self.profile.T2
        else:
            profile.update({"T2_N": self.profile.T2, "t1_s": self.profile.t1})
        return {
            "scenario": self.scenario_name,
            "converged": self.converged,
            "profile": profile,
            "final_mass_kg": self.final_mass,
            "final_time_s": self.duration,
            "angular_range_deg": self.angular_range_deg,
            "losses": self.losses.to_dict(),
            "iterations": self.iterations,
            "residual": list(self.residual),
            "residual_norm": self.residual_norm,
            "history": self.history,
            "pmp": self.pmp,
        }


@dataclass(frozen=True)
class SweepRecord:
    """Achieved orbit for one thrust-parameter grid point, or why there is none."""
    T1: float
    T2: float
    t1: Optional[float]
    feasible: bool
    apogee_km: Optional[float] = None
    perigee_km: Optional[float] = None
    final_mass: Optional[float] = None
    duration: Optional[float] = None
    angular_range_deg: Optional[float] = None
    reason: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# =============================================================================
# Shooting
# =============================================================================

def _orbit_residual(trajectory: Trajectory, scenario: Scenario) -> np.ndarray:
    achieved = shape_from_state(trajectory.final.state, scenario.constants)
    target = scenario.target
    if scenario.settings.residual == "energy":
        return np.array([(achieved.energy - target.energy) / abs(target.energy),
                         (achieved.ang_momentum - target.ang_momentum) / target.ang_momentum])
    if not achieved.closed:
        raise InfeasibleProfileError("Injection on an open orbit", reason="open_orbit")
    return np.array([achieved.apoapsis - target.apoapsis, achieved.periapsis - target.periapsis])


def evaluate(params: Sequence[float], scenario: Scenario) -> Tuple[np.ndarray, Trajectory]:
    """Propagate the profile ``params`` and return (residual, trajectory)."""
    trajectory = propagate(scenario.initial_state(), scenario.profile(params), scenario.propulsion,
                           scenario.mode, scenario.integrator, scenario.constants)
    return _orbit_residual(trajectory, scenario), trajectory


def shoot(params: Sequence[float], scenario: Scenario) -> np.ndarray:
    """Terminal residual (r_a - r_a*, r_p - r_p*) in metres, or scaled (w, h).

    Propagation errors propagate to the caller, which treats the point as
    infeasible.
    """
    return evaluate(params, scenario)[0]


def initial_guess(scenario: Scenario, twr: Optional[float] = None) -> Tuple[float, float]:
    """Constant-thrust seed T = twr m0 g0 (linear slope 0, bilevel levels equal)."""
    twr = scenario.settings.twr if twr is None else twr
    if not twr > 0:
        raise ScenarioError(f"Seed thrust-to-weight ratio must be positive, got {twr}", reason="invalid_value")
    level = twr * scenario.initial_mass * scenario.constants.g0
    return (level, 0.0) if scenario.profile_kind == "linear" else (level, level)


def _seed(scenario: Scenario) -> Tuple[np.ndarray, np.ndarray, Trajectory]:
    """First feasible starting point: the user guess, then scaled constant thrust."""
    candidates = [tuple(scenario.guess)] if scenario.guess else []
    candidates += [initial_guess(scenario, scenario.settings.twr * k) for k in SEED_MULTIPLIERS]
    failures = []
    for params in candidates:
        try:
            residual, trajectory = evaluate(params, scenario)
        except AscentError as e:
            logger.debug("Seed %s infeasible: %s", params, e)
            failures.append({"params": list(params), "reason": e.reason})
            continue
        return np.array(params, dtype=float), residual, trajectory
    raise ConvergenceError("No seed reaches the injection event; supply an initial guess",
                           reason="no_feasible_seed", details={"seeds": failures})


def _jacobian(params: np.ndarray, residual: np.ndarray, scenario: Scenario) -> np.ndarray:
    """Forward-difference Jacobian; falls back to a backward step at infeasible points."""
    floors = FD_FLOORS[scenario.profile_kind]
    jac = np.empty((residual.size, params.size))
    for j in range(params.size):
        h = max(scenario.settings.fd_step * abs(params[j]), floors[j])
        for step in (h, -h):
            shifted = params.copy()
            shifted[j] += step
            try:
                jac[:, j] = (shoot(shifted, scenario) - residual) / step
                break
            except AscentError as e:
                logger.debug("Jacobian column %d infeasible at step %+.3g: %s", j, step, e)
        else:
            raise SingularJacobianError(f"Jacobian column {j} cannot be evaluated around {params}",
                                        best=params)
    return jac


def _newton_step(jac: np.ndarray, residual: np.ndarray, params: np.ndarray) -> np.ndarray:
    try:
        if np.linalg.cond(jac) > 1e14:
            raise np.linalg.LinAlgError("ill-conditioned")
        step = -np.linalg.solve(jac, residual)
    except np.linalg.LinAlgError:
        raise SingularJacobianError(
            f"Singular shooting Jacobian at {params}; try a different initial guess",
            best=params,
        ) from None
    return step


def _line_search(params, step, residual, trajectory, scenario):
    """Halve the Newton step until the residual norm decreases."""
    norm0 = np.linalg.norm(residual)
    lam = 1.0
    for _ in range(scenario.settings.max_halvings + 1):
        trial = params + lam * step
        if scenario.profile(trial).min_thrust(trajectory.duration) <= 0:
            logger.debug("Step %.4g rejected: non-positive thrust", lam)
            lam *= 0.5
            continue
        try:
            trial_residual, trial_trajectory = evaluate(trial, scenario)
        except AscentError as e:
            logger.debug("Step %.4g rejected: %s", lam, e.reason)
            lam *= 0.5
            continue
        if np.linalg.norm(trial_residual) < norm0:
            return trial, trial_residual, trial_trajectory, lam
        lam *= 0.5
    raise ConvergenceError(f"Line search failed after {scenario.settings.max_halvings} halvings",
                           reason="line_search_failed", best=params)


def solve(scenario: Scenario) -> SolveResult:
    """Find the thrust parameters injecting on the target orbit.

    Raises ConvergenceError (with the best iterate) when max_iter is reached,
    SingularJacobianError when the Newton system cannot be solved.
    """
    settings = scenario.settings
    params, residual, trajectory = _seed(scenario)
    history: List[Dict[str, Any]] = []
    lam = None

    for iteration in range(settings.max_iter + 1):
        history.append({"iteration": iteration, "params": params.tolist(), "residual": residual.tolist(),
                        "step_fraction": lam})
        logger.info("Iteration %d: params=(%.6g, %.6g) residual=(%.4g, %.4g)",
                    iteration, params[0], params[1], residual[0], residual[1])
        if np.max(np.abs(residual)) < settings.tolerance:
            return _build_result(scenario, params, residual, trajectory, iteration, history)
        if iteration == settings.max_iter:
            break
        step = _newton_step(_jacobian(params, residual, scenario), residual, params)
        params, residual, trajectory, lam = _line_search(params, step, residual, trajectory, scenario)

    logger.warning("No convergence after %d iterations (residual %s)", settings.max_iter, residual)
    raise ConvergenceError(f"Residual {np.max(np.abs(residual)):.4g} above tolerance after "
                           f"{settings.max_iter} iterations", best=params,
                           details={"residual": residual.tolist(), "params": params.tolist()})


def _build_result(scenario, params, residual, trajectory, iterations, history) -> SolveResult:
    pmp = None
    if scenario.settings.verify:
        from tools.pmp_verify import PmpChecker
        pmp = PmpChecker(trajectory).analyze().summary()
    return SolveResult(
        scenario_name=scenario.name,
        profile=scenario.profile(params),
        final_mass=trajectory.final.state.mass,
        duration=trajectory.duration,
        angular_range_deg=math.degrees(trajectory.angular_range),
        losses=accumulate_losses(trajectory),
        iterations=iterations,
        residual=(float(residual[0]), float(residual[1])),
        converged=True,
        history=history,
        pmp=pmp,
        trajectory=trajectory,
    )


# =============================================================================
# Switching Date
# =============================================================================

def solve_switch_times(scenario: Scenario, t1_values: Sequence[float]) -> List[SolveResult]:
    """Independent bilevel solves, one per fixed switching date."""
    return [solve(replace(scenario, profile_kind="bilevel", t1=float(t1))) for t1 in t1_values]


def optimize_switch_time(scenario: Scenario, bounds: Tuple[float, float],
                         xatol: float = 1.0) -> Tuple[float, SolveResult]:
    """Bounded 1-D search over t1 maximizing the injected mass."""
    solved: Dict[float, SolveResult] = {}

    def negative_mass(t1: float) -> float:
        try:
            solved[t1] = solve(replace(scenario, profile_kind="bilevel", t1=float(t1)))
        except AscentError as e:
            logger.debug("t1=%.3f s not solvable: %s", t1, e.reason)
            return 0.0
        return -solved[t1].final_mass

    best = minimize_scalar(negative_mass, bounds=bounds, method="bounded", options={"xatol": xatol})
    if best.x not in solved:
        negative_mass(best.x)
    if best.x not in solved:
        raise ConvergenceError(f"No solvable switching date in {bounds}", reason="no_solvable_t1")
    return float(best.x), solved[best.x]


# =============================================================================
# Sweeps
# =============================================================================

def _grid_points(scenario: Scenario, grid: Dict[str, Sequence[float]]):
    if not grid or any(len(values) == 0 for values in grid.values()):
        return []
    seed = scenario.guess or initial_guess(scenario)
    axes = [
        grid.get("T1", [seed[0]]),
        grid.get("T2", [seed[1]]),
        grid.get("t1", [scenario.t1]),
    ]
    return list(product(*axes))


def _sweep_point(scenario: Scenario, params: Tuple[float, float, Optional[float]]) -> SweepRecord:
    T1, T2, t1 = params
    point = replace(scenario, t1=t1)
    try:
        trajectory = propagate(point.initial_state(), point.profile((T1, T2)), point.propulsion,
                               point.mode, point.integrator, point.constants)
    except AscentError as e:
        return SweepRecord(T1, T2, t1, False, reason=e.reason)
    shape = shape_from_state(trajectory.final.state, point.constants)
    apogee_km, perigee_km = shape.altitudes_km(point.constants)
    return SweepRecord(T1, T2, t1, True, apogee_km, perigee_km, trajectory.final.state.mass,
                       trajectory.duration, math.degrees(trajectory.angular_range))


def sweep(scenario: Scenario, grid: Dict[str, Sequence[float]], workers: Optional[int] = None) -> List[SweepRecord]:
    """Reachable orbits over a grid of (T1, T2, t1); per-point errors are recorded.

    Records come back in grid order whatever the number of workers.
    """
    points = _grid_points(scenario, grid)
    workers = workers or scenario.settings.workers
    evaluate_point = partial(_sweep_point, scenario)
    if workers <= 1 or len(points) <= 1:
        return [evaluate_point(point) for point in points]
    with multiprocessing.Pool(min(workers, multiprocessing.cpu_count())) as pool:
        return pool.map(evaluate_point, points)
