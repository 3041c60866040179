"""Numerical services: constants, geometry, harmonics, functionals and experiments."""

from .constants import eigenvalue, sharp_constant, theorem_constants
from .experiments import SUITES, run_suite, run_verification
from .harmonics import analyze, load_basis, synthesize
from .reporting import ReportWriter

__all__ = [
    "eigenvalue",
    "sharp_constant",
    "theorem_constants",
    "SUITES",
    "run_suite",
    "run_verification",
    "analyze",
    "load_basis",
    "synthesize",
    "ReportWriter",
]
