"""
Deficit functionals of the FS, HLS, BO and Log-HLS inequalities on S^3.

Every functional takes the spectral representation of its input and reads
grid values from the same coefficients, so quadratic forms and L^p norms of
one input always describe the same band-limited function.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import (
    DomainViolation,
    InvalidParameters,
    NegativeFunction,
    NotNormalized,
    PreconditionViolation,
    ZeroFunction,
)
from ..models.params import InequalityParams
from .constants import eigenvalue, modified_eigenvalue, sharp_constant, sphere_measure
from .grid import POSITIVITY_FLOOR, GridFunction, lp_norm, mean_integral
from .harmonics import (
    SpectralFunction,
    analyze,
    apply_multiplier,
    bo_form,
    check_pluriharmonic,
    fractional_multiplier,
    limit_multiplier,
    modified_multiplier,
    multiplier_vector,
    negative_norm_sq,
    pluriharmonic_project,
    sobolev_norm_sq,
    synthesize,
)

logger = logging.getLogger(__name__)

ZERO_NORM = 1e-14
DEGENERATE_DENOMINATOR = 1e-12
# Largest fraction of nodes that may be raised to the positivity floor.
FLOORED_FRACTION = 1e-3
NORMALIZATION_TOLERANCE = 1e-10
MEAN_TOLERANCE = 1e-10

N = 1


@dataclass(frozen=True)
class HLSDeficit:
    """Absolute C^{-1}|f|_p^2 - ||f||_{-*}^2 and normalized C^{-1} - ||f||_{-*}^2/|f|_p^2."""

    absolute: float
    normalized: float


@dataclass(frozen=True)
class DualRemainderPair:
    """
    Both sides of the dual remainder inequality.

    ratio is i1/i2, whose local limit along 1 + eps*phi is C (Q+4+s)/(Q+4-s);
    scaled_ratio is i1/(C i2). Both are None when i2 is degenerate.
    """

    i1: float
    i2: float
    ratio: Optional[float]
    scaled_ratio: Optional[float]
    residual_sq: float


@dataclass(frozen=True)
class SquareIdentity:
    residual_sq: float
    difference: float
    relative_error: float


def _real_values(F: SpectralFunction) -> GridFunction:
    if not F.real:
        raise DomainViolation("deficit functionals take real-valued functions")
    return synthesize(F)


def _floored_power(f: GridFunction, exponent: float) -> GridFunction:
    values = f.values
    low = float(np.min(values))
    if low < 0.0:
        raise NegativeFunction(f"function must be nonnegative, min value is {low:.3e}")
    floored = values < POSITIVITY_FLOOR
    fraction = float(np.mean(floored))
    if fraction > FLOORED_FRACTION:
        raise DomainViolation(f"{fraction:.2%} of nodes fall below the positivity floor")
    return GridFunction(np.maximum(values, POSITIVITY_FLOOR) ** exponent, f.grid, True)


def fs_deficit(F: SpectralFunction, params: InequalityParams) -> float:
    """||f||_*^2 - C |f|_q^2."""
    f = _real_values(F)
    return sobolev_norm_sq(F, params) - sharp_constant(params) * lp_norm(f, params.q) ** 2


def hls_deficit(F: SpectralFunction, params: InequalityParams) -> HLSDeficit:
    """
    Deficit of ||f||_{-*}^2 <= C^{-1} |f|_p^2 in absolute and normalized form.

    Raises:
        ZeroFunction: |f|_p vanishes
    """
    f = _real_values(F)
    norm_p = lp_norm(f, params.p)
    if norm_p <= ZERO_NORM:
        raise ZeroFunction("HLS deficit is undefined for f = 0")
    inverse_c = 1.0 / sharp_constant(params)
    negative = negative_norm_sq(F, params)
    return HLSDeficit(
        absolute=inverse_c * norm_p**2 - negative,
        normalized=inverse_c - negative / norm_p**2,
    )


def _dual_terms(F: SpectralFunction, params: InequalityParams):
    f = _real_values(F)
    q, p = params.q, params.p
    C = sharp_constant(params)

    norm_q = lp_norm(f, q)
    i1 = norm_q ** (2.0 * (q - 2.0)) * fs_deficit(F, params)

    g = _floored_power(f, q - 1.0)
    G = analyze(g, F.basis, warn=False)
    i2 = lp_norm(g, p) ** 2 - C * negative_norm_sq(G, params)

    lam = multiplier_vector(F.basis, fractional_multiplier(params))
    root = np.sqrt(lam)
    square = norm_q ** (q - 2.0) * root * F.coefficients - C * G.coefficients / root
    return i1, i2, float(np.sum(np.abs(square) ** 2)), C


def dual_remainder_pair(F: SpectralFunction, params: InequalityParams) -> DualRemainderPair:
    """
    i1 = |f|_q^{2(q-2)} (||f||_*^2 - C|f|_q^2) and i2 = |f^{q/p}|_p^2 - C ||f^{q/p}||_{-*}^2.

    Args:
        F: Nonnegative real function
        params: Exponents

    Returns:
        DualRemainderPair with the completion-of-squares residual
    """
    i1, i2, residual, C = _dual_terms(F, params)
    if i2 > DEGENERATE_DENOMINATOR:
        ratio, scaled = i1 / i2, i1 / (C * i2)
    else:
        logger.warning(f"Degenerate denominator i2={i2:.3e}; ratio omitted")
        ratio = scaled = None
    return DualRemainderPair(i1=i1, i2=i2, ratio=ratio, scaled_ratio=scaled, residual_sq=residual)


def square_identity(F: SpectralFunction, params: InequalityParams) -> SquareIdentity:
    """
    Compare || |f|_q^{q-2} A_s^{1/2} f - C A_s^{-1/2} f^{q/p} ||_2^2 with i1 - C i2.

    The two sides come from independent code paths: a spectral square versus the
    deficits assembled from norms.
    """
    i1, i2, residual, C = _dual_terms(F, params)
    difference = i1 - C * i2
    scale = max(abs(residual), abs(difference), 1e-300)
    return SquareIdentity(
        residual_sq=residual,
        difference=difference,
        relative_error=abs(residual - difference) / scale,
    )


def bo_deficit(F: SpectralFunction) -> float:
    """(1/(2(n+1)!)) mean(f A'_Q f) - log mean(e^{f - mean f}) on pluriharmonic f."""
    check_pluriharmonic(F)
    f = _real_values(F)
    centered = np.exp(f.values - F.mean)
    return bo_form(F) / (2.0 * math.factorial(N + 1)) - math.log(
        mean_integral(GridFunction(centered, f.grid, True))
    )


def _log_hls_quadratic(H: SpectralFunction) -> float:
    """mean( h A'_Q^{-1} P h ) for a spectral function h."""
    projected = pluriharmonic_project(H)
    inverted = apply_multiplier(projected, limit_multiplier(N), inverse=True)
    return float(np.real(np.vdot(H.coefficients, inverted.coefficients))) / sphere_measure(N)


def _check_density(f: GridFunction) -> None:
    low = float(np.min(f.values))
    if low <= POSITIVITY_FLOOR:
        raise DomainViolation(f"Log-HLS needs f > 0, min value is {low:.3e}")
    mean = mean_integral(f)
    if abs(mean - 1.0) > NORMALIZATION_TOLERANCE:
        raise NotNormalized(f"mean integral is {mean:.12g}, expected 1")


def loghls_deficit(F: SpectralFunction) -> float:
    """mean(f log f) - ((n+1)!/2) mean((f-1) A'_Q^{-1} P (f-1)) for normalized positive f."""
    f = _real_values(F)
    _check_density(f)
    entropy = mean_integral(GridFunction(f.values * np.log(f.values), f.grid, True))
    return entropy - math.factorial(N + 1) / 2.0 * _log_hls_quadratic(F.shift(-1.0))


def loghls_double_integral(F: SpectralFunction, rows: int = 512) -> float:
    """
    (n+1) mean mean log(1/|1 - zeta.conj(eta)|) f(zeta) f(eta), diagonal pairs skipped.

    The kernel integrates to zero against constants, so the double sum is taken
    in the form -((n+1)/(2|S|^2)) sum_{a != b} w_a w_b K_ab (f_a - f_b)^2.
    """
    f = _real_values(F)
    _check_density(f)
    grid = f.grid
    nodes, weights, values = grid.nodes, grid.weights, f.values
    total = 0.0
    for start in range(0, grid.size, rows):
        stop = min(start + rows, grid.size)
        chord = np.abs(1.0 - nodes[start:stop] @ np.conj(nodes).T)
        diagonal = chord < 1e-14
        kernel = -np.log(np.where(diagonal, 1.0, chord))
        spread = (values[start:stop, None] - values[None, :]) ** 2
        total += float(np.sum(weights[start:stop, None] * weights[None, :] * kernel * spread))
    return -(N + 1) / (2.0 * sphere_measure(N) ** 2) * total


def bo_dual_rhs(F: SpectralFunction) -> float:
    """
    Log-HLS side of the BO dual inequality evaluated at e^f.

    mean(e^f f)/m - ((n+1)!/(2 m^2)) mean((e^f - m) A'_Q^{-1} P (e^f - m)) - log m,
    with m = mean(e^f).
    """
    check_pluriharmonic(F)
    f = _real_values(F)
    e = GridFunction(np.exp(f.values), f.grid, True)
    m = mean_integral(e)
    first = mean_integral(GridFunction(e.values * f.values, f.grid, True)) / m
    E = analyze(e, F.basis, warn=False).shift(-m)
    second = math.factorial(N + 1) / (2.0 * m * m) * _log_hls_quadratic(E)
    return first - second - math.log(m)


def normalize_exponential(F: SpectralFunction) -> SpectralFunction:
    """f - log mean(e^f); both sides of the BO dual inequality are unchanged."""
    f = _real_values(F)
    return F.shift(-math.log(mean_integral(GridFunction(np.exp(f.values), f.grid, True))))


def _christ_quadratic(F: SpectralFunction, params: InequalityParams) -> float:
    measure = sphere_measure(N)
    lam00 = eigenvalue(params, (0, 0))
    return 0.5 * lam00 * negative_norm_sq(F, params) / measure - (
        (params.p - 1.0) / (2.0 * measure)
    ) * F.energy


def _check_christ(F: SpectralFunction, params: InequalityParams, delta: float) -> GridFunction:
    f = _real_values(F)
    if abs(F.mean) > MEAN_TOLERANCE * max(1.0, math.sqrt(F.energy)):
        raise PreconditionViolation(f"Christ functional needs mean-zero f, mean is {F.mean:.3e}")
    limit = delta * sphere_measure(N) ** (1.0 / params.p)
    if lp_norm(f, params.p) > limit:
        raise PreconditionViolation(f"|f|_p exceeds delta |1|_p = {limit:.6g}")
    return f


def christ_phi(F: SpectralFunction, params: InequalityParams, delta: float = 1.0) -> float:
    """
    Second-order functional phi(f) with T = A_s^{-1/2}, F = 1 and q = 2.

    phi(f) = (1/2)|T1|^{-2} int (Tf)^2 - ((p-1)/2)|1|_p^{-p} int f^2 for real mean-zero f.
    """
    _check_christ(F, params, delta)
    return _christ_quadratic(F, params)


def christ_bound(
    F: SpectralFunction,
    params: InequalityParams,
    eta: float,
    c0: float = 1.0,
    c1: float = 1.0,
    delta: float = 1.0,
) -> float:
    """
    Right side of the truncation bound with f1 = f 1{|f| <= eta}, f2 = f - f1.

    1 + phi(f1) + c1 eta |f1|_p^2 |1|_p^{-2} - c0 eta^{2-p} |f2|_p^p / |1|_p^p
    """
    if eta <= 0:
        raise InvalidParameters(f"truncation level eta must be positive, got {eta}")
    f = _check_christ(F, params, delta)
    p, measure = params.p, sphere_measure(N)
    small = np.abs(f.values) <= eta
    f1 = GridFunction(np.where(small, f.values, 0.0), f.grid, True)
    f2 = GridFunction(np.where(small, 0.0, f.values), f.grid, True)
    F1 = analyze(f1, F.basis, warn=False)
    return (
        1.0
        + _christ_quadratic(F1, params)
        + c1 * eta * lp_norm(f1, p) ** 2 * measure ** (-2.0 / p)
        - c0 * eta ** (2.0 - p) * lp_norm(f2, p) ** p / measure
    )


def christ_ratio(F: SpectralFunction, params: InequalityParams) -> float:
    """||1 + f||_{-*} / (C^{-1/2} |1 + f|_p), at most 1 by the HLS inequality."""
    H = F.shift(1.0)
    h = _real_values(H)
    return math.sqrt(sharp_constant(params) * negative_norm_sq(H, params)) / lp_norm(h, params.p)


def limit_bridge_value(F: SpectralFunction, gap: float) -> float:
    """
    Q (4/n!)^2 I(1 + gap f/(2Q)) / gap^3, with I(g) = mean(g A_s g) - Gamma-ratio^2 (mean |g|^q)^{2/q}.

    A_s here carries the modified (prefactor-free) symbol and s = Q - gap.
    Tends to bo_deficit(f) as gap -> 0.
    """
    Q = 2 * N + 2
    params = InequalityParams(n=N, s=Q - gap)
    G = (F * (gap / (2.0 * Q))).shift(1.0)
    g = _real_values(G)
    measure = sphere_measure(N)
    vec = multiplier_vector(G.basis, modified_multiplier(params))
    quadratic = float(np.dot(vec, np.abs(G.coefficients) ** 2)) / measure
    ratio_sq = modified_eigenvalue(params, (0, 0))
    power_mean = float(np.dot(g.grid.weights, np.abs(g.values) ** params.q)) / measure
    I = quadratic - ratio_sq * power_mean ** (2.0 / params.q)
    return Q * (4.0 / math.factorial(N)) ** 2 * I / gap**3
