#!/usr/bin/env python3
"""CLI for AscentCraft."""

import argparse
import copy
import csv
import json
import logging
import math
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from dynamics import Trajectory
from errors import AscentError, OrbitInputError, ScenarioError
from performance import estimate, rate_gravity_loss_estimate
from orbital import apsis_speed
from presets import list_presets
from scenario import build_scenario, dump_scenario, resolve_document, resolve_target_document
from solver import SolveResult, optimize_switch_time, solve, sweep

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = [
    "t_s", "x_m", "y_m", "r_m", "alt_km", "v_ms", "gamma_deg", "theta_deg", "aoa_deg", "phi_deg",
    "mass_kg", "thrust_N", "omega_rads", "H_norm", "Phi", "dVg_ms", "dVt_ms",
]
GRID_KEYS = ("T1", "T2", "t1")


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="AscentCraft - minimum-fuel ascent with closed-loop steering")
    parser.add_argument("command", choices=[
        "estimate", "solve", "sweep", "verify", "check", "presets",
    ], help="Command to run")
    parser.add_argument("target", nargs="?", help="Scenario file, preset name, or trajectory CSV (verify)")
    parser.add_argument("--scenario", "-s", help="Scenario file (YAML)")
    parser.add_argument("--preset", "-p", help="Preset the scenario file is applied over")
    parser.add_argument("--out", "-o", help="Output directory (default: output.directory of the scenario)")
    parser.add_argument("--grid", "-g", action="append", default=[],
                        help="Sweep axis: t1=250,500,750 or T1=20000:40000:5 (start:stop:num)")
    parser.add_argument("--mode", choices=["perigee", "apogee", "first"], help="Injection mode")
    parser.add_argument("--profile", choices=["linear", "bilevel"], help="Thrust law")
    parser.add_argument("--t1", type=float, help="Bilevel switching date, s after ignition")
    parser.add_argument("--optimize-t1", metavar="LO,HI", help="Search the switching date in [LO, HI] s")
    parser.add_argument("--echo-config", action="store_true", help="Print the resolved scenario as YAML")
    parser.add_argument("--tol-rel", type=float, help="Integrator relative tolerance")
    parser.add_argument("--tol-abs", type=float, help="Integrator absolute tolerance")
    parser.add_argument("--tol-residual", type=float, help="Newton residual tolerance, m")
    parser.add_argument("--max-iter", type=int, help="Newton iteration limit")
    parser.add_argument("--workers", type=int, help="Sweep worker processes")
    parser.add_argument("--format", "-f", choices=["console", "json", "markdown"], default="console",
                        help="Report format for verify and check")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log solver iterations")
    parser.add_argument("--quiet", "-q", action="store_true", help="Errors only")
    args = parser.parse_args(argv)

    level = logging.INFO if args.verbose else logging.ERROR if args.quiet else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    # Listing command (no scenario needed)
    if args.command == "presets":
        print("Available presets:")
        for preset in list_presets():
            print(f"  {preset.name}: {preset.description}")
        return 0

    if args.command == "check":
        return _cmd_check(args)

    try:
        csv_target = args.target if args.target and args.target.endswith(".csv") else None
        doc = resolve_target_document(args.scenario or (None if csv_target else args.target), args.preset)
        doc = resolve_document(_overrides(args), doc)
        scenario = build_scenario(doc)

        if args.echo_config:
            print(dump_scenario(doc))

        out_dir = Path(args.out or doc["output"]["directory"])

        if args.command == "estimate":
            return _cmd_estimate(scenario, args)
        elif args.command == "solve":
            return _cmd_solve(scenario, doc, args, out_dir)
        elif args.command == "sweep":
            return _cmd_sweep(scenario, args, out_dir)
        elif args.command == "verify":
            return _cmd_verify(scenario, csv_target, args, out_dir)

    except (ScenarioError, OrbitInputError) as e:
        print(f"Error [{e.reason}]: {e}", file=sys.stderr)
        return 1
    except AscentError as e:
        print(f"Error [{e.reason}]: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 3
    return 0


def _overrides(args) -> Dict:
    """Scenario overrides from command-line flags."""
    overrides: Dict = {}
    if args.mode:
        overrides["mode"] = args.mode
    profile = {}
    if args.profile:
        profile["kind"] = args.profile
    if args.t1 is not None:
        profile.update({"kind": "bilevel", "t1_s": args.t1, "t1_grid_s": []})
    elif args.optimize_t1:
        # search start; the solved date replaces it
        profile.update({"kind": "bilevel", "t1_s": sum(_t1_bounds(args.optimize_t1)) / 2.0, "t1_grid_s": []})
    if profile:
        overrides["profile"] = profile
    integrator = {k: v for k, v in (("rel_tol", args.tol_rel), ("abs_tol", args.tol_abs)) if v is not None}
    if integrator:
        overrides["integrator"] = integrator
    solver = {k: v for k, v in (("residual_tol_m", args.tol_residual), ("max_iter", args.max_iter),
                                ("workers", args.workers)) if v is not None}
    if solver:
        overrides["solver"] = solver
    return overrides


def _t1_bounds(text: str) -> Tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise ScenarioError(f"--optimize-t1 expects LO,HI, got '{text}'", reason="invalid_value") from None
    if not 0 < lo < hi:
        raise ScenarioError(f"--optimize-t1 needs 0 < LO < HI, got '{text}'", reason="invalid_value")
    return lo, hi


def parse_grid(specs: List[str]) -> Dict[str, List[float]]:
    """Sweep axes from ``key=v1,v2,...`` or ``key=start:stop:num`` strings."""
    grid: Dict[str, List[float]] = {}
    for spec in specs:
        key, sep, values = spec.partition("=")
        key = key.strip()
        if not sep or key not in GRID_KEYS:
            raise ScenarioError(f"Grid axis must be one of {', '.join(GRID_KEYS)} as key=values, got '{spec}'",
                                reason="invalid_grid")
        try:
            if ":" in values:
                start, stop, num = values.split(":")
                grid[key] = np.linspace(float(start), float(stop), int(num)).tolist()
            else:
                grid[key] = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise ScenarioError(f"Cannot read grid values '{values}'", reason="invalid_grid") from None
    return grid


# =============================================================================
# Output
# =============================================================================

def emit_trajectory(trajectory: Trajectory, path: Path) -> Path:
    """Write one CSV row per trajectory sample, the last at the injection event."""
    from tools.pmp_verify import hamiltonian_at, resolve_omega_sign

    if not trajectory.points:
        raise ValueError("Empty trajectory")
    c, prop = trajectory.constants, trajectory.propulsion
    sign = resolve_omega_sign(trajectory.points, prop, c)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(TRAJECTORY_COLUMNS)
        for p in trajectory.points:
            terms = hamiltonian_at(p, prop, c, sign)
            row = [
                p.time, p.state.position[0], p.state.position[1], p.polar.r,
                (p.polar.r - c.earth_radius) / 1000.0, p.polar.v,
                math.degrees(p.polar.gamma), math.degrees(p.theta), math.degrees(p.aoa),
                math.degrees(p.polar.phi), p.state.mass, p.thrust, p.omega,
                terms.H_norm, terms.Phi, p.dv_gravity, p.dv_aoa,
            ]
            writer.writerow([f"{value:.12g}" for value in row])
    return path


def write_result(result: SolveResult, doc: Dict, path: Path) -> Path:
    """Results document: a stable section plus the run timestamp."""
    data = result.to_dict()
    pmp = data.pop("pmp")
    document = {
        "stable": {"result": data, "pmp": pmp, "scenario": doc},
        "run": {"timestamp": datetime.now(timezone.utc).isoformat()},
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    return path


def _summary_line(result: SolveResult) -> str:
    profile = result.profile
    if profile.kind == "linear":
        thrust = f"T1={profile.T1 / 1e3:.3f} kN  T2={profile.T2:.3f} N/s"
    else:
        thrust = f"t1={profile.t1:.0f} s  T1={profile.T1 / 1e3:.3f} kN  T2={profile.T2 / 1e3:.3f} kN"
    pmp = "" if result.pmp is None else ("  PMP pass" if result.pmp["passed"] else "  PMP FAIL")
    if result.pmp is not None and result.pmp.get("max_rate_mismatch") is not None:
        pmp += f" (rate gap {100.0 * result.pmp['max_rate_mismatch']:.1f}%)"
    return (f"{thrust}  m_f={result.final_mass:.1f} kg  t_f={result.duration:.1f} s  "
            f"phi_f={result.angular_range_deg:.1f} deg  dV_G={result.losses.dv_gravity:.0f} m/s  "
            f"dV_T={result.losses.dv_aoa:.0f} m/s  ({result.iterations} it){pmp}")


# =============================================================================
# Commands
# =============================================================================

def _cmd_estimate(scenario, args) -> int:
    """Handle estimate command."""
    losses = estimate(scenario)
    polar = scenario.initial
    rate_form = rate_gravity_loss_estimate(polar.r, polar.v, polar.gamma, scenario.constants)
    v_p = apsis_speed(scenario.target, "perigee", scenario.constants)
    if args.format == "json":
        print(json.dumps({**losses.to_dict(), "rate_gravity_loss": rate_form, "perigee_speed": v_p},
                         indent=2, sort_keys=True))
        return 0
    print(f"Estimate: {scenario.name}")
    print(f"  Gravity loss dV_G:        {losses.dv_gravity:.0f} m/s")
    print(f"  Rate form (cross-check):  {rate_form:.0f} m/s")
    print(f"  Target perigee speed:     {v_p:.0f} m/s")
    print(f"  Total impulse:            {losses.dv_total_impulse:.0f} m/s")
    print(f"  Final mass m_f:           {losses.m_f_est:.0f} kg")
    return 0


def _cmd_solve(scenario, doc, args, out_dir: Path) -> int:
    """Handle solve command."""
    if args.optimize_t1:
        t1, result = optimize_switch_time(scenario, _t1_bounds(args.optimize_t1))
        print(f"Best switching date: t1 = {t1:.1f} s")
        runs = [(f"{scenario.name}_t1-{t1:.0f}", result)]
    elif scenario.profile_kind == "bilevel" and scenario.t1 is None:
        runs = [(f"{scenario.name}_t1-{t1:.0f}", solve(replace(scenario, t1=t1))) for t1 in scenario.t1_grid]
    else:
        runs = [(scenario.name, solve(scenario))]

    status = 0
    for name, result in runs:
        run_doc = copy.deepcopy(doc)
        if result.profile.kind == "bilevel":
            run_doc["profile"].update({"kind": "bilevel", "t1_s": result.profile.t1, "t1_grid_s": []})
        csv_path = emit_trajectory(result.trajectory, out_dir / f"{name}_trajectory.csv")
        json_path = write_result(result, run_doc, out_dir / f"{name}_result.json")
        print(f"{name}: {_summary_line(result)}")
        print(f"  Wrote: {csv_path}")
        print(f"  Wrote: {json_path}")
        if result.pmp is not None and not result.pmp["passed"]:
            status = 2
    return status


def _cmd_sweep(scenario, args, out_dir: Path) -> int:
    """Handle sweep command."""
    grid = parse_grid(args.grid)
    if not grid:
        raise ScenarioError("sweep needs at least one --grid axis", reason="missing_grid")
    out_dir.mkdir(parents=True, exist_ok=True)

    if set(grid) == {"t1"}:
        path = out_dir / f"{scenario.name}_t1_sweep.csv"
        columns = ["t1_s", "T1_N", "T2_N", "final_mass_kg", "final_time_s", "angular_range_deg",
                   "dVg_ms", "dVt_ms", "converged", "reason"]
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(columns)
            for t1 in grid["t1"]:
                try:
                    r = solve(replace(scenario, profile_kind="bilevel", t1=t1))
                except AscentError as e:
                    writer.writerow([t1, "", "", "", "", "", "", "", False, e.reason])
                    continue
                writer.writerow([t1, r.profile.T1, r.profile.T2, r.final_mass, r.duration,
                                 r.angular_range_deg, r.losses.dv_gravity, r.losses.dv_aoa, True, ""])
                print(f"t1={t1:.0f} s: {_summary_line(r)}")
        print(f"Wrote: {path}")
        return 0

    records = sweep(scenario, grid, args.workers)
    path = out_dir / f"{scenario.name}_sweep.csv"
    columns = ["T1", "T2", "t1", "feasible", "apogee_km", "perigee_km", "final_mass", "duration",
               "angular_range_deg", "reason"]
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=columns)
        writer.writeheader()
        for record in records:
            writer.writerow(record.to_dict())
    feasible = sum(r.feasible for r in records)
    print(f"Swept {len(records)} point(s), {feasible} reach injection")
    print(f"Wrote: {path}")
    return 0


def _cmd_verify(scenario, csv_target, args, out_dir: Path) -> int:
    """Handle verify command."""
    from tools.pmp_verify import verify_scenario, verify_trajectory_csv

    if csv_target:
        report = verify_trajectory_csv(Path(csv_target), scenario)
        name = Path(csv_target).stem
    else:
        report = verify_scenario(scenario)
        name = scenario.name
    print(report.generate_report(args.format))
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{name}_pmp.json").write_text(report.generate_report("json") + "\n")
    return report.exit_code()


def _cmd_check(args) -> int:
    """Handle check command."""
    from tools.reference_check import ReferenceChecker

    checker = ReferenceChecker()
    checker.check_all()
    print(checker.generate_report(args.format))
    return checker.get_exit_code()


if __name__ == "__main__":
    sys.exit(main())
