"""Tests for the shooting solver, switching-date search and sweeps."""

import json
from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

import solver
from errors import ConvergenceError, InfeasibleProfileError, ScenarioError, SingularJacobianError
from orbital import cartesian_to_polar, shape_from_apsides, shape_from_state, state_from_polar
from scenario import from_preset
from solver import Scenario, SolverSettings, initial_guess, optimize_switch_time, solve_switch_times, sweep


@pytest.fixture
def linear():
    return from_preset("gto-linear")


@pytest.fixture
def bilevel():
    return from_preset("gto-bilevel-500")


def test_initial_guess_from_thrust_to_weight(linear, bilevel):
    assert initial_guess(linear) == pytest.approx((24516.625, 0.0))
    level, second = initial_guess(bilevel)
    assert level == second
    assert initial_guess(linear, twr=0.5)[0] == pytest.approx(2 * 24516.625)


def test_initial_guess_rejects_non_positive_twr(linear):
    with pytest.raises(ScenarioError):
        initial_guess(linear, twr=0.0)


def test_bilevel_profile_needs_t1(bilevel):
    with pytest.raises(ScenarioError) as exc:
        replace(bilevel, t1=None).profile((1.0, 2.0))
    assert exc.value.reason == "missing_t1"
    assert bilevel.profile((3.0, 2.0)).t1 == 500.0


def test_open_target_is_rejected(linear):
    shape = shape_from_apsides(36000e3, 300e3)
    open_shape = replace(shape, energy=1.0)
    with pytest.raises(ScenarioError) as exc:
        replace(linear, target=open_shape)
    assert exc.value.reason == "open_target"


def test_solver_settings_validation():
    with pytest.raises(ScenarioError):
        SolverSettings(residual="bogus")
    with pytest.raises(ScenarioError):
        SolverSettings(max_iter=0)
    assert SolverSettings(residual="energy").tolerance == 1e-7
    assert SolverSettings().tolerance == 10.0


# =============================================================================
# Newton internals
# =============================================================================

def test_newton_step_solves_the_linear_system():
    step = solver._newton_step(np.array([[2.0, 0.0], [0.0, 4.0]]), np.array([2.0, -4.0]), np.zeros(2))
    assert step == pytest.approx([-1.0, 1.0])


@pytest.mark.parametrize("jac", [np.zeros((2, 2)), np.array([[1.0, 2.0], [2.0, 4.0]])])
def test_newton_step_rejects_singular_jacobian(jac):
    with pytest.raises(SingularJacobianError) as exc:
        solver._newton_step(jac, np.ones(2), np.array([1.0, 2.0]))
    assert exc.value.best == pytest.approx([1.0, 2.0])


def test_jacobian_falls_back_to_backward_step(monkeypatch, linear):
    def fake_evaluate(params, scenario):
        if params[0] > 30000.0:
            raise InfeasibleProfileError("too much thrust")
        return np.array([2.0 * params[0], 3.0 * params[1]]), None

    monkeypatch.setattr(solver, "evaluate", fake_evaluate)
    params = np.array([30000.0, 10.0])
    jac = solver._jacobian(params, np.array([60000.0, 30.0]), linear)
    assert jac == pytest.approx(np.diag([2.0, 3.0]), rel=1e-6)


def test_jacobian_fails_when_both_steps_are_infeasible(monkeypatch, linear):
    def fake_evaluate(params, scenario):
        raise InfeasibleProfileError("nowhere")

    monkeypatch.setattr(solver, "evaluate", fake_evaluate)
    with pytest.raises(SingularJacobianError):
        solver._jacobian(np.array([30000.0, 0.0]), np.zeros(2), linear)


def test_solve_reports_singular_jacobian(monkeypatch, linear):
    monkeypatch.setattr(solver, "evaluate", lambda params, scenario: (np.array([1e5, 1e5]), None))
    monkeypatch.setattr(solver, "_jacobian", lambda params, residual, scenario: np.zeros((2, 2)))
    with pytest.raises(SingularJacobianError) as exc:
        solver.solve(linear)
    assert exc.value.best == pytest.approx(initial_guess(linear))


def test_line_search_failure(monkeypatch, linear):
    trajectory = SimpleNamespace(duration=1000.0)
    monkeypatch.setattr(solver, "evaluate", lambda params, scenario: (np.array([100.0, 100.0]), trajectory))
    monkeypatch.setattr(solver, "_jacobian", lambda params, residual, scenario: np.eye(2))
    scenario = replace(linear, settings=replace(linear.settings, max_halvings=3))
    with pytest.raises(ConvergenceError) as exc:
        solver.solve(scenario)
    assert exc.value.reason == "line_search_failed"


def test_no_feasible_seed(monkeypatch, linear):
    def fake_evaluate(params, scenario):
        raise InfeasibleProfileError("depleted")

    monkeypatch.setattr(solver, "evaluate", fake_evaluate)
    scenario = replace(linear, guess=(30000.0, -5.0))
    with pytest.raises(ConvergenceError) as exc:
        solver.solve(scenario)
    assert exc.value.reason == "no_feasible_seed"
    seeds = exc.value.details["seeds"]
    assert len(seeds) == 1 + len(solver.SEED_MULTIPLIERS)
    assert seeds[0]["params"] == [30000.0, -5.0]
    assert all(seed["reason"] == "mass_depleted" for seed in seeds)


# =============================================================================
# Switching date
# =============================================================================

def test_solve_switch_times_keeps_order(monkeypatch, linear):
    monkeypatch.setattr(solver, "solve", lambda scenario: SimpleNamespace(t1=scenario.t1,
                                                                         kind=scenario.profile_kind))
    results = solve_switch_times(linear, [750, 250, 500])
    assert [r.t1 for r in results] == [750.0, 250.0, 500.0]
    assert {r.kind for r in results} == {"bilevel"}


def test_optimize_switch_time_finds_the_peak(monkeypatch, bilevel):
    def fake_solve(scenario):
        return SimpleNamespace(t1=scenario.t1, final_mass=1422.0 - ((scenario.t1 - 400.0) / 100.0) ** 2)

    monkeypatch.setattr(solver, "solve", fake_solve)
    t1, result = optimize_switch_time(bilevel, (100.0, 900.0), xatol=0.5)
    assert t1 == pytest.approx(400.0, abs=2.0)
    assert result.t1 == t1


def test_optimize_switch_time_without_solutions(monkeypatch, bilevel):
    def fake_solve(scenario):
        raise ConvergenceError("never")

    monkeypatch.setattr(solver, "solve", fake_solve)
    with pytest.raises(ConvergenceError) as exc:
        optimize_switch_time(bilevel, (100.0, 900.0))
    assert exc.value.reason == "no_solvable_t1"


# =============================================================================
# Sweeps
# =============================================================================

@pytest.mark.parametrize("grid", [{}, {"T1": [], "T2": [-10.976]}])
def test_empty_grid_gives_no_records(linear, grid):
    assert sweep(linear, grid) == []


def test_sweep_records_infeasible_points_in_order(linear):
    records = sweep(linear, {"T1": [26467.0], "T2": [-10.976, -100.0]})
    assert [r.T2 for r in records] == [-10.976, -100.0]
    reached, failed = records
    assert reached.feasible
    assert reached.apogee_km == pytest.approx(36000.0, rel=0.1)
    assert reached.perigee_km == pytest.approx(300.0, abs=50.0)
    assert not failed.feasible
    assert failed.reason == "invalid_profile"
    assert failed.apogee_km is None


@pytest.mark.slow
def test_parallel_sweep_matches_serial(linear):
    grid = {"T1": [25000.0, 26467.0], "T2": [-10.976, -5.0]}
    assert sweep(linear, grid, workers=2) == sweep(linear, grid, workers=1)


# =============================================================================
# Reference solutions
# =============================================================================

@pytest.fixture(scope="module")
def linear_result():
    return solver.solve(from_preset("gto-linear"))


BILEVEL_PRESETS = ("gto-bilevel-250", "gto-bilevel-500", "gto-bilevel-750")


@pytest.fixture(scope="module")
def bilevel_results():
    return {name: solver.solve(from_preset(name)) for name in BILEVEL_PRESETS}


@pytest.mark.slow
def test_linear_reference_solution(linear_result):
    result = linear_result
    assert result.converged
    assert result.iterations <= 25
    assert result.profile.T1 == pytest.approx(26467.0, abs=50.0)
    assert result.profile.T2 == pytest.approx(-10.976, abs=0.05)
    assert result.final_mass == pytest.approx(1422.5, abs=0.5)
    assert result.duration == pytest.approx(1308.5, abs=2.0)
    assert result.angular_range_deg == pytest.approx(69.7, abs=0.3)
    assert result.losses.dv_gravity == pytest.approx(555.0, abs=3.0)
    assert result.losses.dv_aoa == pytest.approx(27.0, abs=2.0)
    assert max(abs(x) for x in result.residual) < 10.0


@pytest.mark.slow
def test_linear_solution_is_verified_and_serializable(linear_result):
    pmp = linear_result.pmp
    assert pmp["passed"]
    assert pmp["omega_sign"] == -1
    assert pmp["max_H0_norm"] < 1e-8
    # distance from a stationary arc on the converged trajectory
    assert 0.02 < pmp["max_rate_mismatch"] < 0.3
    assert pmp["costate_max_rel_dev"] == pytest.approx(0.139, abs=0.03)
    assert pmp["max_pv_norm_dev"] == pytest.approx(0.109, abs=0.03)
    assert pmp["max_psi_dev"] == pytest.approx(0.057, abs=0.02)
    assert pmp["max_Phi_m_propagated"] == pytest.approx(0.051, abs=0.02)
    assert len(linear_result.history) == linear_result.iterations + 1
    data = json.loads(json.dumps(linear_result.to_dict()))
    assert data["profile"]["kind"] == "linear"
    assert "T2_Ns" in data["profile"]
    assert data["pmp"]["diagnostics"]["rate_consistency"]["final"] < 1e-6


@pytest.mark.slow
def test_linear_solution_is_integrator_independent(linear_result):
    scenario = from_preset("gto-linear")
    refined = replace(scenario, integrator=scenario.integrator.refined(0.5),
                      settings=replace(scenario.settings, verify=False))
    again = solver.solve(refined)
    assert again.final_mass == pytest.approx(linear_result.final_mass, abs=0.1)
    assert again.duration == pytest.approx(linear_result.duration, abs=0.2)


@pytest.mark.slow
@pytest.mark.parametrize("name, T1, T2, final_mass, duration, angular_range, dv_gravity, dv_aoa", [
    ("gto-bilevel-250", 37942.0, 12842.0, 1422.7, 1476.3, 79.2, 545.0, 37.0),
    ("gto-bilevel-500", 26339.0, 13799.0, 1422.5, 1374.4, 73.6, 555.0, 28.0),
    ("gto-bilevel-750", 23378.0, 14015.0, 1422.5, 1299.5, 69.3, 558.0, 25.0),
])
def test_bilevel_reference_solutions(bilevel_results, name, T1, T2, final_mass, duration, angular_range,
                                     dv_gravity, dv_aoa):
    result = bilevel_results[name]
    assert result.iterations <= 25
    assert result.profile.T1 == pytest.approx(T1, abs=50.0)
    assert result.profile.T2 == pytest.approx(T2, abs=50.0)
    assert result.final_mass == pytest.approx(final_mass, abs=0.5)
    assert result.duration == pytest.approx(duration, abs=2.0)
    assert result.angular_range_deg == pytest.approx(angular_range, abs=0.3)
    assert result.losses.dv_gravity == pytest.approx(dv_gravity, abs=3.0)
    assert result.losses.dv_aoa == pytest.approx(dv_aoa, abs=2.0)
    assert result.pmp["passed"]
    assert result.pmp["max_H0_norm"] < 1e-8
    assert result.to_dict()["profile"]["t1_s"] == result.profile.t1


@pytest.mark.slow
def test_injected_mass_barely_depends_on_the_thrust_law(linear_result, bilevel_results):
    masses = [linear_result.final_mass] + [r.final_mass for r in bilevel_results.values()]
    assert max(masses) - min(masses) <= 0.3


@pytest.mark.slow
def test_higher_perigee_costs_mass(linear):
    unverified = replace(linear.settings, verify=False)
    masses = [solver.solve(replace(linear, target=shape_from_apsides(36000e3, perigee * 1e3),
                                   settings=unverified)).final_mass
              for perigee in (280.0, 300.0, 320.0)]
    assert masses[0] > masses[1] > masses[2]


@pytest.mark.slow
def test_target_already_reached_converges_at_once(linear):
    start = state_from_polar(300e3, 7800.0, -1e-6, linear.initial_mass)
    initial = cartesian_to_polar(start)
    scenario = replace(linear, initial=initial, target=shape_from_state(start), name="near-orbit",
                       settings=replace(linear.settings, verify=False))
    result = solver.solve(scenario)
    assert result.converged
    assert result.iterations <= 25
    assert result.duration < 1.0
    assert result.trajectory.injection == "perigee"
    assert result.final_mass > 0.99 * linear.initial_mass
    assert max(abs(x) for x in result.residual) < 10.0


@pytest.mark.slow
def test_iteration_limit_raises_with_best_iterate():
    scenario = from_preset("gto-linear")
    scenario = replace(scenario, settings=replace(scenario.settings, max_iter=1, verify=False))
    with pytest.raises(ConvergenceError) as exc:
        solver.solve(scenario)
    assert exc.value.reason == "not_converged"
    assert exc.value.best is not None
