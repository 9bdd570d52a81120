#!/usr/bin/env python3
"""
Named scenario presets for AscentCraft.

Each preset is a set of overrides on the default scenario in
scenario_config.py. The GTO presets are the linear and fixed-switch bilevel
ascents of the reference table.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List

from errors import ScenarioError


@dataclass
class Preset:
    """Scenario overrides under a name."""
    name: str
    description: str
    overrides: Dict[str, Any] = field(default_factory=dict)


def _bilevel(t1: float) -> Preset:
    name = f"gto-bilevel-{t1:.0f}"
    return Preset(name, f"GTO ascent, bilevel thrust switching at t1 = {t1:.0f} s",
                  {"name": name, "profile": {"kind": "bilevel", "t1_s": t1}})


PRESETS: Dict[str, Preset] = {
    "gto-linear": Preset("gto-linear", "GTO ascent, linear thrust law"),
    "gto-bilevel-250": _bilevel(250.0),
    "gto-bilevel-500": _bilevel(500.0),
    "gto-bilevel-750": _bilevel(750.0),
    "gto-bilevel-sweep": Preset(
        "gto-bilevel-sweep", "GTO ascent, bilevel thrust solved for t1 = 250, 500, 750 s",
        {"name": "gto-bilevel-sweep", "profile": {"kind": "bilevel", "t1_grid_s": [250.0, 500.0, 750.0]}},
    ),
    "gto-apsides-first": Preset(
        "gto-apsides-first", "GTO ascent, linear thrust, injection at the first apsis crossed",
        {"name": "gto-apsides-first", "mode": "first"},
    ),
}


def get_preset(name: str) -> Preset:
    """Look up a preset by name."""
    try:
        return PRESETS[name]
    except KeyError:
        raise ScenarioError(
            f"Unknown preset '{name}'. Available: {', '.join(sorted(PRESETS))}",
            reason="unknown_preset",
        ) from None


def list_presets() -> List[Preset]:
    return [PRESETS[k] for k in sorted(PRESETS)]
