"""Pydantic report records emitted by the experiment suites."""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class CheckResult(BaseModel):
    """One tolerance check inside an experiment."""

    name: str
    value: Optional[float] = None
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    passed: bool
    detail: str = ""


class DeficitReport(BaseModel):
    """Deficit values, distances and ratio diagnostics for one experiment."""

    experiment: str
    config: Dict[str, Any]
    rng: str = Field("numpy.random.PCG64", description="Pseudo-random algorithm")
    provenance: str = Field("unknown", description="git describe of the working tree")
    grid: Dict[str, int] = Field(default_factory=dict)
    checks: List[CheckResult] = Field(default_factory=list)
    tables: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict)
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def violations(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def add_check(
        self,
        name: str,
        value: Optional[float],
        expected: Optional[float] = None,
        tolerance: Optional[float] = None,
        passed: Optional[bool] = None,
        detail: str = "",
    ) -> CheckResult:
        """Append a check; absolute-tolerance comparison when `passed` is not given."""
        if passed is None:
            passed = (
                value is not None
                and expected is not None
                and tolerance is not None
                and abs(value - expected) <= tolerance
            )
        check = CheckResult(
            name=name,
            value=value,
            expected=expected,
            tolerance=tolerance,
            passed=bool(passed),
            detail=detail,
        )
        self.checks.append(check)
        return check
