"""Distances to the extremizer manifolds by multi-start local search over the (c, xi) chart."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field
from scipy.optimize import minimize, minimize_scalar

from ..config import config
from ..exceptions import InvalidParameters, NonConvergence, ZeroFunction
from ..models.params import InequalityParams
from .conformal import ExtremizerPoint, extremizer_fs, extremizer_hls, vector_from_xi, xi_from_vector
from .grid import GridFunction, lp_norm
from .harmonics import SpectralFunction, analyze, fractional_multiplier, multiplier_vector, synthesize

logger = logging.getLogger(__name__)

SEED_SCALES = (0.25, 0.5, 1.0, -0.25)
# Relative gap under which two local minima count as tied.
TIE_TOLERANCE = 1e-12


class DistanceOptions(BaseModel):
    """Optimizer settings for distance computations."""

    starts: int = Field(default_factory=lambda: config.STARTS, ge=1)
    warm_starts: int = Field(1, ge=1, description="Starts used when a warm start is given")
    gradient_tol: float = Field(1e-9, gt=0)
    max_iter: int = Field(4000, ge=10)
    xi_cap: float = Field(0.9, gt=0, lt=1)
    fd_step: float = Field(1e-6, gt=0)
    require_convergence: bool = True
    trace: bool = False


@dataclass(frozen=True, eq=False)
class DistanceResult:
    """Best local minimum of a distance search."""

    distance: float
    argmin: Optional[ExtremizerPoint]
    starts_tried: int
    converged: bool
    residual_gradient_norm: float
    zero_limit: bool = False
    trace: List[Tuple[int, int, float]] = field(default_factory=list, repr=False)

    def trace_frame(self) -> pd.DataFrame:
        """Per-evaluation objective values (start, evaluation, value)."""
        return pd.DataFrame(self.trace, columns=["start", "evaluation", "value"])


@dataclass
class _Candidate:
    value: float
    xi: np.ndarray
    c: float
    gradient: float
    converged: bool


def _gradient_norm(objective: Callable[[np.ndarray], float], x: np.ndarray, h: float) -> float:
    grad = np.empty_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (objective(x + step) - objective(x - step)) / (2.0 * h)
    return float(np.linalg.norm(grad))


def _seeds(values: np.ndarray, nodes: np.ndarray, weights: np.ndarray, starts: int) -> List[np.ndarray]:
    """v = 0, then multiples of the normalized first moment of |f|^2, then coordinate axes."""
    density = weights * np.abs(values) ** 2
    moment = nodes.T @ density
    total = float(np.sum(density))
    seeds = [np.zeros(4)]
    radius = float(np.linalg.norm(moment))
    if total > 0 and radius > 1e-12 * total:
        d = moment / radius
        direction = np.array([d[0].real, d[0].imag, d[1].real, d[1].imag])
        seeds += [t * direction for t in SEED_SCALES]
    seeds += [0.5 * axis for axis in np.eye(4)]

    unique: List[np.ndarray] = []
    for seed in seeds:
        if not any(np.allclose(seed, other, atol=1e-12) for other in unique):
            unique.append(seed)
    return unique[:starts]


def _warm_seeds(
    initial: Optional[ExtremizerPoint], values: np.ndarray, grid, opts: DistanceOptions
) -> List[np.ndarray]:
    """Seeds of a search; a warm start replaces all but opts.warm_starts - 1 of the cold ones."""
    if initial is None:
        return _seeds(values, grid.nodes, grid.weights, opts.starts)
    cold = _seeds(values, grid.nodes, grid.weights, opts.warm_starts)
    warm = vector_from_xi(initial.xi)
    rest = [seed for seed in cold if not np.allclose(seed, warm, atol=1e-12)]
    return [warm] + rest[: opts.warm_starts - 1]


def _pick(candidates: List[_Candidate]) -> _Candidate:
    """Smallest value; near-ties go to the smaller |xi|."""
    pool = [c for c in candidates if c.converged] or candidates
    best = min(c.value for c in pool)
    tied = [c for c in pool if c.value <= best + TIE_TOLERANCE * max(1.0, abs(best))]
    return min(tied, key=lambda c: (float(np.linalg.norm(c.xi)), c.value))


def _search(
    objective: Callable[[np.ndarray], float],
    seeds: List[np.ndarray],
    opts: DistanceOptions,
    converged_by_success: bool,
    xatol: float = 1e-8,
    fatol: float = 1e-13,
) -> List[Tuple[np.ndarray, float, float, bool]]:
    runs = []
    for seed in seeds:
        result = minimize(
            objective,
            seed,
            method="Nelder-Mead",
            options={"maxiter": opts.max_iter, "xatol": xatol, "fatol": fatol, "adaptive": True},
        )
        x, value = result.x, float(result.fun)
        gradient = _gradient_norm(objective, x, opts.fd_step)
        if not converged_by_success and gradient > opts.gradient_tol:
            polish = minimize(
                objective, x, method="BFGS", jac="3-point", options={"maxiter": 200, "gtol": opts.gradient_tol}
            )
            if float(polish.fun) <= value:
                x, value = polish.x, float(polish.fun)
                gradient = _gradient_norm(objective, x, opts.fd_step)
        converged = bool(result.success) if converged_by_success else gradient <= opts.gradient_tol
        runs.append((x, value, gradient, converged))
    return runs


def distance_fs(
    F: SpectralFunction,
    params: InequalityParams,
    options: Optional[DistanceOptions] = None,
    initial: Optional[ExtremizerPoint] = None,
) -> DistanceResult:
    """
    d(f, M_*) in the Sobolev norm ||.||_*.

    For each xi the scale c is eliminated in closed form,
    c*(xi) = <f, g_xi>_* / ||g_xi||_*^2, and xi = v / sqrt(1 + |v|^2) is searched
    by Nelder-Mead from several seeds.

    Args:
        F: Real band-limited function
        params: Exponents
        options: Optimizer settings
        initial: Warm start, usually the argmin of a nearby function

    Returns:
        DistanceResult

    Raises:
        NonConvergence: no start met the gradient certificate (with require_convergence)
    """
    opts = options or DistanceOptions()
    basis = F.basis
    lam = multiplier_vector(basis, fractional_multiplier(params))
    norm_sq = float(np.dot(lam, np.abs(F.coefficients) ** 2))
    if norm_sq <= 0:
        raise ZeroFunction("distance to M_* needs ||f||_* > 0")

    trace: List[Tuple[int, int, float]] = []
    current = {"start": 0, "count": 0}

    def profile(xi: np.ndarray) -> Tuple[float, float]:
        g = extremizer_fs(ExtremizerPoint(1.0, xi), params, basis.grid)
        G = analyze(g, basis, warn=False).coefficients
        gg = float(np.dot(lam, np.abs(G) ** 2))
        c = float(np.real(np.dot(lam, np.conj(G) * F.coefficients))) / gg
        residual = F.coefficients - c * G
        return float(np.dot(lam, np.abs(residual) ** 2)) / norm_sq, c

    def objective(v: np.ndarray) -> float:
        value, _ = profile(xi_from_vector(v, opts.xi_cap))
        if opts.trace:
            current["count"] += 1
            trace.append((current["start"], current["count"], value))
        return value

    f = synthesize(F)
    seeds = _warm_seeds(initial, f.values, basis.grid, opts)
    candidates = []
    for index, seed in enumerate(seeds):
        current["start"], current["count"] = index, 0
        (x, value, gradient, converged), = _search(objective, [seed], opts, converged_by_success=False)
        xi = xi_from_vector(x, opts.xi_cap)
        _, c = profile(xi)
        candidates.append(_Candidate(value, xi, c, gradient, converged))
        logger.debug(f"distance_fs start {index}: value {value:.3e}, |grad| {gradient:.1e}")

    best = _pick(candidates)
    any_converged = any(c.converged for c in candidates)
    if opts.require_convergence and not any_converged:
        raise NonConvergence(
            f"no start met the gradient tolerance {opts.gradient_tol:g} "
            f"(best |grad| {min(c.gradient for c in candidates):.3e})"
        )

    distance = math.sqrt(max(best.value, 0.0) * norm_sq)
    ceiling = math.sqrt(norm_sq)
    zero_limit = distance > ceiling or best.c == 0.0
    if zero_limit:
        distance = ceiling
    argmin = ExtremizerPoint(best.c, best.xi) if best.c != 0.0 else None
    return DistanceResult(
        distance=distance,
        argmin=argmin,
        starts_tried=len(seeds),
        converged=any_converged,
        residual_gradient_norm=best.gradient,
        zero_limit=zero_limit,
        trace=trace,
    )


def _ray_projection(values, g_values, weights, p: float) -> Tuple[float, float]:
    norm_f = float(np.dot(weights, np.abs(values) ** p)) ** (1.0 / p)
    norm_g = float(np.dot(weights, np.abs(g_values) ** p)) ** (1.0 / p)
    if norm_g == 0.0:
        return 0.0, norm_f
    bound = 2.0 * norm_f / norm_g

    def lp(t: float) -> float:
        return float(np.dot(weights, np.abs(values - t * g_values) ** p)) ** (1.0 / p)

    result = minimize_scalar(lp, bounds=(-bound, bound), method="bounded", options={"xatol": 1e-12})
    t, value = float(result.x), float(result.fun)
    if value > norm_f:
        return 0.0, norm_f
    return t, value


def lp_ray_projection(f: GridFunction, g: GridFunction, p: float) -> Tuple[float, float]:
    """
    Minimize t -> |f - t g|_p over the real line.

    The map is strictly convex for p > 1 and exceeds |f|_p once |t| > 2|f|_p/|g|_p,
    so a bounded scalar search on that interval finds the unique minimizer.

    Returns:
        (t*, |f - t* g|_p)
    """
    if p <= 1:
        raise InvalidParameters(f"ray projection needs p > 1, got {p}")
    return _ray_projection(f.values, g.values, f.grid.weights, p)


def distance_hls(
    f: Union[GridFunction, SpectralFunction],
    params: InequalityParams,
    options: Optional[DistanceOptions] = None,
    initial: Optional[ExtremizerPoint] = None,
) -> DistanceResult:
    """
    d_p(f, M_{-*}) in the Lebesgue norm |.|_p.

    The outer Nelder-Mead search runs over xi; the scale c comes from the inner
    ray projection. Convergence is the simplex search's own success flag and the
    finite-difference gradient is reported as a diagnostic.
    """
    opts = options or DistanceOptions()
    grid_f = synthesize(f) if isinstance(f, SpectralFunction) else f
    if not grid_f.real:
        raise InvalidParameters("distance_hls takes real-valued functions")
    grid = grid_f.grid
    p = params.p
    norm_p = lp_norm(grid_f, p)
    if norm_p <= 0:
        raise ZeroFunction("distance to M_-* needs |f|_p > 0")

    trace: List[Tuple[int, int, float]] = []
    current = {"start": 0, "count": 0}

    def profile(xi: np.ndarray) -> Tuple[float, float]:
        g = extremizer_hls(ExtremizerPoint(1.0, xi), params, grid)
        t, value = _ray_projection(grid_f.values, g.values, grid.weights, p)
        return value / norm_p, t

    def objective(v: np.ndarray) -> float:
        value, _ = profile(xi_from_vector(v, opts.xi_cap))
        if opts.trace:
            current["count"] += 1
            trace.append((current["start"], current["count"], value))
        return value

    seeds = _warm_seeds(initial, grid_f.values, grid, opts)
    candidates = []
    for index, seed in enumerate(seeds):
        current["start"], current["count"] = index, 0
        (x, value, gradient, converged), = _search(
            objective, [seed], opts, converged_by_success=True, xatol=1e-8, fatol=1e-13
        )
        xi = xi_from_vector(x, opts.xi_cap)
        _, t = profile(xi)
        candidates.append(_Candidate(value, xi, t, gradient, converged))

    best = _pick(candidates)
    any_converged = any(c.converged for c in candidates)
    if opts.require_convergence and not any_converged:
        raise NonConvergence("no Nelder-Mead start converged for d_p(f, M_-*)")

    zero_limit = best.c == 0.0
    return DistanceResult(
        distance=min(best.value, 1.0) * norm_p,
        argmin=None if zero_limit else ExtremizerPoint(best.c, best.xi),
        starts_tried=len(seeds),
        converged=any_converged,
        residual_gradient_norm=best.gradient,
        zero_limit=zero_limit,
        trace=trace,
    )
