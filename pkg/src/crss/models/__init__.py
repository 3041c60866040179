"""Domain records and the run ledger."""

from .params import ExperimentConfig, InequalityParams, ModeIndex, TheoremConstants, Tolerances
from .reports import CheckResult, DeficitReport
from .run import Base, ExperimentRun

__all__ = [
    "Base",
    "CheckResult",
    "DeficitReport",
    "ExperimentConfig",
    "ExperimentRun",
    "InequalityParams",
    "ModeIndex",
    "TheoremConstants",
    "Tolerances",
]
