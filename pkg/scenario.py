#!/usr/bin/env python3
"""Scenario loading and validation for AscentCraft.

A scenario document is the default ``config`` from scenario_config.py with
a preset and/or a YAML scenario file merged over it. Keys carry their unit
as a suffix; everything is converted to SI when the Scenario is built.
"""

import copy
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from dynamics import IntegratorConfig, InjectionMode, Propulsion
from errors import AscentError, ScenarioError
from orbital import Constants, OrbitShape, PolarKinematics, shape_from_apsides
from presets import PRESETS, get_preset
from scenario_config import config
from solver import Scenario, SolverSettings

logger = logging.getLogger(__name__)

SCENARIOS_DIR = Path(__file__).parent.absolute() / "scenarios"

SCALAR_KEYS = ("name", "mode")
TARGET_FORMS = (
    ("apogee_km", "perigee_km"),
    ("energy_jkg", "ang_momentum_m2s"),
    ("semi_major_km", "eccentricity"),
)
ALLOWED_KEYS = {section: set(values) for section, values in config.items() if isinstance(values, dict)}
ALLOWED_KEYS["target"] = {key for form in TARGET_FORMS for key in form}
ALLOWED_KEYS["propulsion"] |= {"isp_s"}


# =============================================================================
# Documents
# =============================================================================

def load_document(path) -> Dict[str, Any]:
    """Parse a YAML scenario file."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"Scenario file not found: {path}", reason="file_not_found")
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ScenarioError(f"{path}: {e}", reason="invalid_yaml") from None
    return doc or {}


def resolve_document(user: Optional[Dict[str, Any]], base: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Merge ``user`` over ``base`` (default config), rejecting unknown keys.

    A target section replaces the base target entirely; ``isp_s`` and
    ``ve_ms`` replace each other.
    """
    doc = copy.deepcopy(config if base is None else base)
    if user is None:
        return doc
    if not isinstance(user, dict):
        raise ScenarioError("Scenario document must be a mapping", reason="invalid_value")

    for key, value in user.items():
        if key in SCALAR_KEYS:
            doc[key] = value
            continue
        if key not in ALLOWED_KEYS:
            raise ScenarioError(f"Unknown section '{key}'", reason="unknown_key", details={"key": key})
        if not isinstance(value, dict):
            raise ScenarioError(f"Section '{key}' must be a mapping", reason="invalid_value")
        unknown = sorted(set(value) - ALLOWED_KEYS[key])
        if unknown:
            raise ScenarioError(f"Unknown key(s) in '{key}': {', '.join(map(str, unknown))}",
                                reason="unknown_key", details={"section": key, "keys": unknown})

        if key == "target":
            doc[key] = dict(value)
        elif key == "propulsion":
            if "ve_ms" in value and "isp_s" in value:
                raise ScenarioError("Give either propulsion.ve_ms or propulsion.isp_s, not both",
                                    reason="conflicting_keys")
            replaced = {"ve_ms": "isp_s", "isp_s": "ve_ms"}
            for k in value:
                if k in replaced:
                    doc[key].pop(replaced[k], None)
            doc[key].update(value)
        else:
            doc[key].update(value)
    return doc


def resolve_target_document(target: Optional[str] = None, preset: Optional[str] = None) -> Dict[str, Any]:
    """Document for a scenario file or preset name, optionally on top of a preset."""
    base = resolve_document(get_preset(preset).overrides) if preset else None
    if target is None:
        return resolve_document(None, base)

    path = Path(target)
    if not path.exists() and not path.suffix and (SCENARIOS_DIR / f"{target}.yaml").exists():
        path = SCENARIOS_DIR / f"{target}.yaml"
    if path.exists() or path.suffix in (".yaml", ".yml"):
        user = load_document(path)
        doc = resolve_document(user, base)
        if "name" not in user:
            doc["name"] = path.stem
        return doc
    if target in PRESETS:
        return resolve_document(get_preset(target).overrides, base)
    raise ScenarioError(f"'{target}' is neither a scenario file nor a preset", reason="unknown_scenario")


def dump_scenario(doc: Dict[str, Any]) -> str:
    """YAML text of a resolved document; it loads back to the same Scenario."""
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


# =============================================================================
# Validation
# =============================================================================

def _float(doc, section, key, positive=False, non_negative=False) -> float:
    value = doc[section][key] if section else doc[key]
    label = f"{section}.{key}" if section else key
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ScenarioError(f"{label} must be a finite number, got {value!r}", reason="invalid_value",
                            details={"key": label})
    if positive and not value > 0:
        raise ScenarioError(f"{label} must be positive, got {value}", reason="invalid_value",
                            details={"key": label})
    if non_negative and value < 0:
        raise ScenarioError(f"{label} must be non-negative, got {value}", reason="invalid_value",
                            details={"key": label})
    return float(value)


def _int(doc, section, key) -> int:
    value = _float(doc, section, key, non_negative=True)
    if not value.is_integer():
        raise ScenarioError(f"{section}.{key} must be an integer, got {value}", reason="invalid_value")
    return int(value)


def _floats(values, label) -> tuple:
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ScenarioError(f"{label} must be a list of numbers, got {values!r}", reason="invalid_value") from None


def _target(doc, c: Constants) -> OrbitShape:
    target = doc["target"]
    forms = [form for form in TARGET_FORMS if all(k in target for k in form)]
    if len(forms) != 1 or set(target) != set(forms[0]):
        raise ScenarioError(
            "Target needs exactly one of: " + "; ".join(" + ".join(form) for form in TARGET_FORMS),
            reason="invalid_target",
        )
    form = forms[0]
    a, b = (_float(doc, "target", k) for k in form)
    if form == TARGET_FORMS[0]:
        return shape_from_apsides(a * 1000.0, b * 1000.0, c)
    if form == TARGET_FORMS[1]:
        return OrbitShape.from_energy(a, b, c)
    return OrbitShape.from_elements(a * 1000.0, b, c)


def _propulsion(doc, c: Constants) -> Propulsion:
    dry = _float(doc, "propulsion", "dry_mass_kg", non_negative=True)
    if "isp_s" in doc["propulsion"]:
        return Propulsion.from_isp(_float(doc, "propulsion", "isp_s", positive=True), c.g0, dry)
    if "ve_ms" not in doc["propulsion"]:
        raise ScenarioError("propulsion needs ve_ms or isp_s", reason="invalid_value")
    return Propulsion(_float(doc, "propulsion", "ve_ms", positive=True), dry)


def build_scenario(doc: Dict[str, Any]) -> Scenario:
    """Validate a resolved document and convert it to a Scenario in SI units."""
    try:
        c = Constants(
            mu=_float(doc, "constants", "mu_m3s2", positive=True),
            earth_radius=_float(doc, "constants", "earth_radius_m", positive=True),
            g0=_float(doc, "constants", "g0_ms2", positive=True),
        )
        initial = PolarKinematics(
            r=c.earth_radius + 1000.0 * _float(doc, "initial", "altitude_km"),
            v=_float(doc, "initial", "velocity_ms", positive=True),
            gamma=math.radians(_float(doc, "initial", "gamma_deg")),
            phi=math.radians(_float(doc, "initial", "longitude_deg")),
        )
        if not initial.r > 0 or not abs(initial.gamma) < 0.5 * math.pi:
            raise ScenarioError("Initial state must be above the center with |gamma| < 90 deg",
                                reason="invalid_value")

        profile = doc["profile"]
        kind = profile["kind"]
        t1 = None if profile["t1_s"] is None else _float(doc, "profile", "t1_s", positive=True)
        t1_grid = _floats(profile["t1_grid_s"] or [], "profile.t1_grid_s")
        if any(not t > 0 for t in t1_grid):
            raise ScenarioError("profile.t1_grid_s values must be positive", reason="invalid_value")
        if kind == "bilevel" and t1 is None and not t1_grid:
            raise ScenarioError("Bilevel profile needs profile.t1_s or profile.t1_grid_s", reason="missing_t1")
        guess = profile["guess"]
        if guess is not None:
            if not isinstance(guess, (list, tuple)) or len(guess) != 2:
                raise ScenarioError("profile.guess must be [T1, T2]", reason="invalid_value")
            guess = _floats(guess, "profile.guess")

        try:
            mode = InjectionMode(doc["mode"])
        except ValueError:
            raise ScenarioError(f"mode must be perigee, apogee or first, got {doc['mode']!r}",
                                reason="invalid_value") from None

        integrator = IntegratorConfig(
            rel_tol=_float(doc, "integrator", "rel_tol"),
            abs_tol=_float(doc, "integrator", "abs_tol"),
            max_step=_float(doc, "integrator", "max_step_s"),
            event_tol=_float(doc, "integrator", "event_tol_rad"),
            max_time=_float(doc, "integrator", "max_time_s"),
            sample_step=_float(doc, "integrator", "sample_step_s"),
        )
        solver = doc["solver"]
        settings = SolverSettings(
            residual=solver["residual"],
            residual_tol=_float(doc, "solver", "residual_tol_m"),
            scaled_tol=_float(doc, "solver", "scaled_tol"),
            max_iter=_int(doc, "solver", "max_iter"),
            fd_step=_float(doc, "solver", "fd_step"),
            max_halvings=_int(doc, "solver", "max_halvings"),
            twr=_float(doc, "solver", "twr"),
            workers=_int(doc, "solver", "workers"),
            verify=bool(solver["verify"]),
        )

        return Scenario(
            initial=initial,
            initial_mass=_float(doc, "initial", "mass_kg", positive=True),
            target=_target(doc, c),
            propulsion=_propulsion(doc, c),
            profile_kind=kind,
            t1=t1,
            t1_grid=t1_grid,
            mode=mode,
            integrator=integrator,
            settings=settings,
            constants=c,
            t0=_float(doc, "initial", "time_s"),
            guess=guess,
            name=str(doc["name"]),
        )
    except ScenarioError:
        raise
    except AscentError as e:
        raise ScenarioError(str(e), reason=e.reason, details=e.details) from None


# =============================================================================
# Entry Points
# =============================================================================

def load_scenario(path) -> Scenario:
    """Scenario from a YAML file over the defaults."""
    return build_scenario(resolve_target_document(str(path)))


def from_preset(name: str) -> Scenario:
    return build_scenario(resolve_document(get_preset(name).overrides))


def resolve_scenario(target: Optional[str] = None, preset: Optional[str] = None) -> Scenario:
    """Scenario for a file path or preset name; the default scenario when both are None."""
    return build_scenario(resolve_target_document(target, preset))
