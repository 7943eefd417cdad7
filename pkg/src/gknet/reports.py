"""Structured verdicts produced by the feasibility checks."""

from __future__ import annotations

from dataclasses import dataclass, field

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
CUT_CONDITIONS_HOLD = "cut-conditions-hold"

RATE_TOL = 1e-9  # additive slack for rate-vs-cut comparisons


@dataclass(frozen=True)
class Check:
    label: str
    lhs: float
    rhs: float
    holds: bool

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class FeasibilityReport:
    scheme: str
    checks: tuple
    verdict: str
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks)

    def failing(self) -> tuple:
        return tuple(c for c in self.checks if not c.holds)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "verdict": self.verdict,
            "feasible": self.ok,
            "checks": [
                {
                    "label": c.label,
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "slack": c.slack,
                    "holds": c.holds,
                }
                for c in self.checks
            ],
            "witnesses": self.witnesses,
        }

    def csv_rows(self) -> list:
        rows = [["label", "lhs", "rhs", "slack", "holds"]]
        rows += [[c.label, c.lhs, c.rhs, c.slack, c.holds] for c in self.checks]
        return rows


def rate_check(label: str, lhs: float, rhs: float, tol: float = RATE_TOL) -> Check:
    lhs = float(lhs)
    rhs = float(rhs)
    return Check(label, lhs, rhs, lhs <= rhs + tol)


def build_report(scheme, checks, witnesses=None, on_pass=FEASIBLE) -> FeasibilityReport:
    checks = tuple(checks)
    verdict = on_pass if all(c.holds for c in checks) else INFEASIBLE
    return FeasibilityReport(scheme, checks, verdict, dict(witnesses or {}))
