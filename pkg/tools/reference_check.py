#!/usr/bin/env python3
"""
Reference checks for AscentCraft.

Solves the GTO presets and compares them with the published optimal
solutions:
- Thrust parameters, injected mass, burn time and angular range
- Gravity and angle-of-attack losses
- Pre-flight estimate (gravity loss, injected mass, < 2% mass error)
- Integrator independence (tolerances halved)

Usage:
    python3 tools/reference_check.py [--json] [--markdown] [--preset NAME ...] [--skip-robustness]

Exit codes:
    0 - All values within tolerance
    1 - Warnings found
    2 - Errors found
    3 - Script error
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from errors import AscentError  # noqa: E402
from performance import estimate  # noqa: E402
from scenario import from_preset  # noqa: E402
from solver import SolveResult, solve  # noqa: E402

logger = logging.getLogger(__name__)


class Severity(Enum):
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


@dataclass
class Issue:
    type: str
    location: str
    severity: Severity
    description: str
    details: Dict[str, Any] = field(default_factory=dict)


# =============================================================================
# Reference Values
# =============================================================================

@dataclass(frozen=True)
class Reference:
    """Published optimum for one thrust law (T2 in N/s linear, N bilevel)."""
    T1: float  # N
    T2: float
    final_mass: float  # kg
    duration: float  # s
    angular_range_deg: float
    dv_gravity: float  # m/s
    dv_aoa: float  # m/s


REFERENCES: Dict[str, Reference] = {
    "gto-linear": Reference(26467.0, -10.976, 1422.5, 1308.5, 69.7, 555.0, 27.0),
    "gto-bilevel-250": Reference(37942.0, 12842.0, 1422.7, 1476.3, 79.2, 545.0, 37.0),
    "gto-bilevel-500": Reference(26339.0, 13799.0, 1422.5, 1374.4, 73.6, 555.0, 28.0),
    "gto-bilevel-750": Reference(23378.0, 14015.0, 1422.5, 1299.5, 69.3, 558.0, 25.0),
}

TOLERANCES = {
    "T1": 50.0,
    "T2_linear": 0.05,
    "T2_bilevel": 50.0,
    "final_mass": 0.5,
    "duration": 2.0,
    "angular_range_deg": 0.3,
    "dv_gravity": 3.0,
    "dv_aoa": 2.0,
}

ESTIMATE_REFERENCE = {"dv_gravity": (536.0, 1.0), "m_f_est": (1445.0, 2.0)}
ESTIMATE_MAX_MASS_ERROR = 0.02
ROBUSTNESS_LIMITS = {"final_mass": 0.1, "duration": 0.2}


class ReferenceChecker:
    """Solve presets and compare against the reference optima."""

    def __init__(self, presets: Optional[List[str]] = None, robustness: bool = True):
        self.presets = presets or list(REFERENCES)
        self.robustness = robustness
        self.issues: List[Issue] = []
        self.results: Dict[str, SolveResult] = {}

    def check_all(self) -> List[Issue]:
        """Run all reference checks."""
        self.issues = []
        for name in self.presets:
            self._check_preset(name)
        if "gto-linear" in self.results:
            self._check_estimate(self.results["gto-linear"])
            if self.robustness:
                self._check_robustness(self.results["gto-linear"])
        return self.issues

    def _compare(self, location: str, quantity: str, value: float, expected: float, tol: float) -> None:
        ok = abs(value - expected) <= tol
        self.issues.append(Issue(
            quantity, location, Severity.INFO if ok else Severity.ERROR,
            f"{quantity} = {value:.6g} (reference {expected:.6g} +/- {tol:g})",
            {"value": value, "expected": expected, "tolerance": tol},
        ))

    def _check_preset(self, name: str) -> None:
        reference = REFERENCES.get(name)
        if reference is None:
            self.issues.append(Issue("unknown_preset", name, Severity.WARNING, "No reference values for this preset"))
            return
        try:
            result = solve(from_preset(name))
        except AscentError as e:
            self.issues.append(Issue("solve_failed", name, Severity.ERROR, str(e), {"reason": e.reason}))
            return
        self.results[name] = result

        t2_tol = TOLERANCES["T2_linear"] if result.profile.kind == "linear" else TOLERANCES["T2_bilevel"]
        self._compare(name, "T1", result.profile.T1, reference.T1, TOLERANCES["T1"])
        self._compare(name, "T2", result.profile.T2, reference.T2, t2_tol)
        for quantity, value in (
            ("final_mass", result.final_mass),
            ("duration", result.duration),
            ("angular_range_deg", result.angular_range_deg),
            ("dv_gravity", result.losses.dv_gravity),
            ("dv_aoa", result.losses.dv_aoa),
        ):
            self._compare(name, quantity, value, getattr(reference, quantity), TOLERANCES[quantity])

        if result.pmp is not None and not result.pmp["passed"]:
            self.issues.append(Issue("optimality", name, Severity.ERROR,
                                     "Solved trajectory fails the optimality checks", result.pmp))

    def _check_estimate(self, result: SolveResult) -> None:
        losses = estimate(from_preset("gto-linear"))
        for quantity, (expected, tol) in ESTIMATE_REFERENCE.items():
            self._compare("estimate", quantity, getattr(losses, quantity), expected, tol)
        error = abs(losses.m_f_est - result.final_mass) / result.final_mass
        self.issues.append(Issue(
            "estimate_error", "estimate",
            Severity.INFO if error < ESTIMATE_MAX_MASS_ERROR else Severity.WARNING,
            f"Estimated vs solved final mass differ by {100 * error:.2f}%",
            {"relative_error": error},
        ))

    def _check_robustness(self, result: SolveResult) -> None:
        scenario = from_preset("gto-linear")
        refined = replace(scenario, integrator=scenario.integrator.refined(0.5),
                          settings=replace(scenario.settings, verify=False))
        try:
            again = solve(refined)
        except AscentError as e:
            self.issues.append(Issue("robustness", "gto-linear", Severity.ERROR, str(e), {"reason": e.reason}))
            return
        for quantity, limit in ROBUSTNESS_LIMITS.items():
            change = abs(getattr(again, quantity) - getattr(result, quantity))
            self.issues.append(Issue(
                "robustness", "gto-linear", Severity.INFO if change < limit else Severity.WARNING,
                f"{quantity} changes by {change:.3g} with tolerances halved (limit {limit:g})",
                {"quantity": quantity, "change": change, "limit": limit},
            ))

    def generate_report(self, format: str = "console") -> str:
        """Generate report in specified format."""
        if format == "json":
            return self._report_json()
        elif format == "markdown":
            return self._report_markdown()
        return self._report_console()

    def _report_console(self) -> str:
        errors = [i for i in self.issues if i.severity == Severity.ERROR]
        warnings = [i for i in self.issues if i.severity == Severity.WARNING]
        lines = [
            "\nReference Check",
            "=" * 60,
            f"Errors: {len(errors)}, Warnings: {len(warnings)}",
            "",
        ]
        for name, result in self.results.items():
            lines.append(f"{name}: T1={result.profile.T1:.1f} N  T2={result.profile.T2:.4g}  "
                         f"m_f={result.final_mass:.2f} kg  t_f={result.duration:.2f} s")
        lines.append("")
        icons = {Severity.ERROR: "!!", Severity.WARNING: "--", Severity.INFO: "ok"}
        for issue in self.issues:
            lines.append(f"[{icons[issue.severity]}] {issue.location}: {issue.description}")
        return "\n".join(lines)

    def _report_json(self) -> str:
        return json.dumps({
            "results": {name: r.to_dict() for name, r in self.results.items()},
            "errors": len([i for i in self.issues if i.severity == Severity.ERROR]),
            "warnings": len([i for i in self.issues if i.severity == Severity.WARNING]),
            "issues": [
                {
                    "type": i.type,
                    "location": i.location,
                    "severity": i.severity.value,
                    "description": i.description,
                    "details": i.details,
                }
                for i in self.issues
            ],
        }, indent=2, sort_keys=True)

    def _report_markdown(self) -> str:
        lines = ["# Reference Check", ""]
        for severity in [Severity.ERROR, Severity.WARNING, Severity.INFO]:
            issues = [i for i in self.issues if i.severity == severity]
            if issues:
                lines.append(f"## {severity.value.title()} ({len(issues)})")
                lines.append("")
                for issue in issues:
                    lines.append(f"- **{issue.location}** {issue.description}")
                lines.append("")
        return "\n".join(lines)

    def get_exit_code(self) -> int:
        """Return exit code based on issues found."""
        if any(i.severity == Severity.ERROR for i in self.issues):
            return 2
        if any(i.severity == Severity.WARNING for i in self.issues):
            return 1
        return 0


def main():
    parser = argparse.ArgumentParser(
        description="Compare solved presets with the reference optima",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exit codes:
  0 - All values within tolerance
  1 - Warnings only
  2 - Errors found
  3 - Script error
        """
    )
    parser.add_argument("--preset", action="append", help="Preset to check (repeatable, default: all)")
    parser.add_argument("--json", action="store_true", help="Output as JSON")
    parser.add_argument("--markdown", action="store_true", help="Output as Markdown")
    parser.add_argument("--skip-robustness", action="store_true", help="Skip the halved-tolerance re-solve")
    args = parser.parse_args()

    try:
        checker = ReferenceChecker(args.preset, robustness=not args.skip_robustness)
        checker.check_all()

        if args.json:
            print(checker.generate_report("json"))
        elif args.markdown:
            print(checker.generate_report("markdown"))
        else:
            print(checker.generate_report("console"))

        sys.exit(checker.get_exit_code())

    except Exception as e:
        print(f"Error: {e}", file=sys.stderr)
        import traceback
        traceback.print_exc()
        sys.exit(3)


if __name__ == "__main__":
    main()
