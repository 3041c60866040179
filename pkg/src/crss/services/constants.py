"""Closed-form constants: gamma-ratio eigenvalues, sharp constants and theorem constants."""

import logging
import math
from typing import Iterable, Union

import numpy as np
import pandas as pd
from scipy.special import gammaln

from ..exceptions import InvalidParameters
from ..models.params import InequalityParams, ModeIndex, TheoremConstants
from ..utils.extrapolation import empirical_order

logger = logging.getLogger(__name__)

IWASAWA_CENTER_DIMENSIONS = (0, 1, 3, 7)

ModeLike = Union[ModeIndex, tuple]


def _mode(mode: ModeLike) -> ModeIndex:
    j, k = int(mode[0]), int(mode[1])
    if j < 0 or k < 0:
        raise InvalidParameters(f"mode ({j}, {k}) must have nonnegative indices")
    return ModeIndex(j, k)


def _half_exponents(params: InequalityParams):
    return (params.Q + params.s) / 4.0, (params.Q - params.s) / 4.0


def sharp_constant(params: InequalityParams) -> float:
    """
    Sharp constant C of the fractional Sobolev inequality on the CR sphere.

    C = (4 pi^{Q/2} / n!)^{s/Q} * Gamma^2((Q+s)/4) / Gamma^2((Q-s)/4)

    Args:
        params: Exponent bookkeeping (n, s)

    Returns:
        Positive constant C
    """
    n, Q, s = params.n, params.Q, params.s
    a, b = _half_exponents(params)
    log_c = (s / Q) * (math.log(4.0) + 0.5 * Q * math.log(math.pi) - gammaln(n + 1))
    log_c += 2.0 * (gammaln(a) - gammaln(b))
    return float(np.exp(log_c))


def modified_eigenvalue(params: InequalityParams, mode: ModeLike) -> float:
    """Eigenvalue of A_s on H_{j,k} without the 2^{s/Q} prefactor."""
    j, k = _mode(mode)
    a, b = _half_exponents(params)
    log_value = gammaln(j + a) + gammaln(k + a) - gammaln(j + b) - gammaln(k + b)
    return float(np.exp(log_value))


def eigenvalue(params: InequalityParams, mode: ModeLike) -> float:
    """
    Eigenvalue lambda_{j,k} of the intertwining operator A_s on H_{j,k}.

    Args:
        params: Exponent bookkeeping (n, s)
        mode: Bidegree (j, k)

    Returns:
        2^{s/Q} Gamma(j+a)Gamma(k+a) / (Gamma(j+b)Gamma(k+b)), a = (Q+s)/4, b = (Q-s)/4
    """
    return 2.0 ** (params.s / params.Q) * modified_eigenvalue(params, mode)


def eigenvalue_limit(n: int, j: int) -> float:
    """Eigenvalue lambda'_j = Gamma(j+n+1)/Gamma(j) = j(j+1)...(j+n) of A'_Q on H_{j,0}."""
    if n < 1:
        raise InvalidParameters(f"n={n} must be positive")
    if j < 1:
        raise InvalidParameters(f"j={j} must be at least 1; A'_Q vanishes on constants")
    return float(np.exp(gammaln(j + n + 1) - gammaln(j)))


def d_operator_eigenvalue(n: int, mode: ModeLike) -> float:
    """Eigenvalue (j+n/2)(k+n/2) of the conformal sublaplacian D on H_{j,k}."""
    j, k = _mode(mode)
    return (j + n / 2.0) * (k + n / 2.0)


def sphere_measure(n: int) -> float:
    """Surface measure |S^{2n+1}| = 2 pi^{n+1} / n!."""
    if n < 1:
        raise InvalidParameters(f"n={n} must be positive")
    return 2.0 * math.pi ** (n + 1) / math.factorial(n)


def subspace_dimension(n: int, mode: ModeLike) -> int:
    """dim H_{j,k}; only the S^3 case is tabulated."""
    if n != 1:
        raise InvalidParameters(f"subspace dimensions are tabulated for n=1 only, got n={n}")
    j, k = _mode(mode)
    return j + k + 1


def theorem_constants(params: InequalityParams) -> TheoremConstants:
    """Local FS constant, dual remainder ratio, BO ratio and spectral gap."""
    Q, s = params.Q, params.s
    gap = 1.0 - eigenvalue(params, (1, 0)) / eigenvalue(params, (2, 0))
    return TheoremConstants(
        fs_local=2.0 * s / (Q + 4.0 + s),
        dual_ratio=(Q + 4.0 + s) / (Q + 4.0 - s) * sharp_constant(params),
        bo_ratio=float(params.n + 2),
        spectral_gap=gap,
    )


def iwasawa_dual_ratio(Q: int, s: float, m: int) -> float:
    """
    Dual remainder constant (without the C factor) on Iwasawa groups.

    Args:
        Q: Homogeneous dimension
        s: Fractional order, 0 < s < Q - 4 floor(m/2)
        m: Dimension of the center (0 Euclidean, 1 Heisenberg, 3, 7)

    Returns:
        (Q + 2 + 2 sign(m) + s) / (Q + 2 + 2 sign(m) - s)
    """
    if m not in IWASAWA_CENTER_DIMENSIONS:
        raise InvalidParameters(f"center dimension m={m} must be one of {IWASAWA_CENTER_DIMENSIONS}")
    upper = Q - 4 * (m // 2)
    if not (0 < s < upper):
        raise InvalidParameters(f"s={s} outside the admissible range (0, {upper}) for m={m}")
    shift = Q + 2 + 2 * (1 if m > 0 else 0)
    return (shift + s) / (shift - s)


def fractional_kernel_constant(params: InequalityParams) -> float:
    """Constant of the group-side fundamental solution of L_s."""
    n, s = params.n, params.s
    _, b = _half_exponents(params)
    log_value = (n - 1 - s / 2.0) * math.log(2.0) + 2.0 * gammaln(b)
    log_value -= (n + 1) * math.log(math.pi) + gammaln(s / 2.0)
    return float(np.exp(log_value))


def sphere_kernel_constant(params: InequalityParams) -> float:
    """Constant of the kernel of A_s^{-1}; the kernel decays like |1 - zeta.conj(eta)|^{(s-Q)/2}."""
    n, s, Q = params.n, params.s, params.Q
    _, b = _half_exponents(params)
    log_value = (-1.0 - s / Q) * math.log(2.0) + 2.0 * gammaln(b)
    log_value -= (n + 1) * math.log(math.pi) + gammaln(s / 2.0)
    return float(np.exp(log_value))


def sublaplacian_kernel_constant(n: int) -> float:
    """Constant 2^{n-2} Gamma^2(n/2) / pi^{n+1} of the fundamental solution of L."""
    return float(np.exp((n - 2) * math.log(2.0) + 2.0 * gammaln(n / 2.0) - (n + 1) * math.log(math.pi)))


def d_operator_kernel_constant(n: int) -> float:
    """Constant Gamma^2(n/2) / (2 pi^{n+1}) of the kernel of D^{-1} on the sphere."""
    return float(np.exp(2.0 * gammaln(n / 2.0) - math.log(2.0) - (n + 1) * math.log(math.pi)))


def log_kernel_constant(n: int) -> float:
    """Constant pi^{-(n+1)} of the logarithmic kernel of A'_Q^{-1} P."""
    return math.pi ** (-(n + 1))


def local_dual_ratio(params: InequalityParams, mode: ModeLike) -> float:
    """Limit of i1/i2 along 1 + eps*phi, phi in H_{j,k} + H_{k,j}: C lambda_{j,k} / lambda_{1,0}."""
    return sharp_constant(params) * eigenvalue(params, mode) / eigenvalue(params, (1, 0))


def local_bo_ratio(n: int, j: int) -> float:
    """Limit of the BO deficit over the Log-HLS side along eps*phi_j: lambda'_j / (n+1)!."""
    return eigenvalue_limit(n, j) / math.factorial(n + 1)


def limit_bridge(n: int, j: int, s: float) -> float:
    """(4/n!) * modified_eigenvalue(j, 0) / (Q - s); tends to lambda'_j as s -> Q."""
    params = InequalityParams(n=n, s=s)
    return 4.0 / math.factorial(n) * modified_eigenvalue(params, (j, 0)) / params.gap


def limit_bridge_table(n: int, j: int, gaps: Iterable[float]) -> pd.DataFrame:
    """
    Tabulate the endpoint bridge against lambda'_j along decreasing gaps Q - s.

    Args:
        n: Complex dimension
        j: Holomorphic degree
        gaps: Values of Q - s, ordered from coarse to fine

    Returns:
        DataFrame with columns gap, value, target, error, order
    """
    Q = 2 * n + 2
    gaps = [float(g) for g in gaps]
    target = eigenvalue_limit(n, j)
    values = [limit_bridge(n, j, Q - g) for g in gaps]
    errors = [abs(v - target) for v in values]
    orders = [float("nan")]
    for i in range(1, len(gaps)):
        orders.append(empirical_order(gaps[: i + 1], values[: i + 1], limit=target))
    logger.debug(f"Bridge table n={n} j={j}: errors {errors}")
    return pd.DataFrame(
        {"gap": gaps, "value": values, "target": target, "error": errors, "order": orders}
    )
