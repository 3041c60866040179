"""Heisenberg group geometry, the Cayley transform and fundamental-solution kernels."""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import integrate

from ..exceptions import DomainViolation, InvalidParameters, PoleSingularity, SingularDiagonal
from ..models.params import InequalityParams, ModeIndex
from .constants import log_kernel_constant, sphere_kernel_constant, fractional_kernel_constant
from .harmonics import disk_polynomial

logger = logging.getLogger(__name__)

# Tolerances documented in SETUP.md.
ROUND_TRIP_TOLERANCE = 1e-10
POLE_GUARD = 1e-12
DIAGONAL_GUARD = 1e-14
UNIT_NORM_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class GroupPoint:
    """Point u = (z, t) of H^n."""

    z: np.ndarray
    t: float

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.z, dtype=complex))
        if z.ndim != 1:
            raise InvalidParameters(f"z must be a complex n-vector, got shape {z.shape}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return int(self.z.shape[0])

    @classmethod
    def origin(cls, n: int = 1) -> "GroupPoint":
        return cls(np.zeros(n, dtype=complex), 0.0)


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """Unit vector zeta of C^{n+1}."""

    zeta: np.ndarray

    def __post_init__(self):
        zeta = np.atleast_1d(np.asarray(self.zeta, dtype=complex))
        defect = abs(float(np.vdot(zeta, zeta).real) - 1.0)
        if defect > UNIT_NORM_TOLERANCE:
            raise DomainViolation(f"sphere point has | |zeta|^2 - 1 | = {defect:.3e}")
        object.__setattr__(self, "zeta", zeta)

    @property
    def n(self) -> int:
        return int(self.zeta.shape[0]) - 1

    @classmethod
    def north(cls, n: int = 1) -> "SpherePoint":
        zeta = np.zeros(n + 1, dtype=complex)
        zeta[-1] = 1.0
        return cls(zeta)


# Array forms: z has shape (P, n), t shape (P,), zeta shape (P, n+1).


def multiply_arrays(z1, t1, z2, t2) -> Tuple[np.ndarray, np.ndarray]:
    twist = 2.0 * np.imag(np.sum(z1 * np.conj(z2), axis=-1))
    return z1 + z2, t1 + t2 + twist


def cayley_arrays(z: np.ndarray, t: np.ndarray) -> np.ndarray:
    r2 = np.sum(np.abs(z) ** 2, axis=-1)
    denom = 1.0 + r2 - 1j * t
    head = 2.0 * z / denom[..., None]
    tail = (1.0 - r2 + 1j * t) / denom
    return np.concatenate([head, tail[..., None]], axis=-1)


def cayley_inverse_arrays(zeta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Inverse Cayley map; raises PoleSingularity at the first point near the south pole."""
    one_plus = 1.0 + zeta[..., -1]
    close = np.abs(one_plus) < POLE_GUARD
    if np.any(close):
        first = int(np.flatnonzero(np.ravel(close))[0])
        raise PoleSingularity(f"point {first} lies within {POLE_GUARD} of the south pole")
    z = zeta[..., :-1] / one_plus[..., None]
    t = -np.imag(2.0 / one_plus)
    return z, t


def cayley_jacobian_arrays(z: np.ndarray, t: np.ndarray) -> np.ndarray:
    n = z.shape[-1]
    Q = 2 * n + 2
    r2 = np.sum(np.abs(z) ** 2, axis=-1)
    return 2.0 ** (Q - 1) * ((1.0 + r2) ** 2 + t**2) ** (-Q / 2.0)


def sphere_jacobian_arrays(zeta: np.ndarray) -> np.ndarray:
    """|J_C| at C^{-1}(zeta), written on the sphere side: (1/2)|1 + zeta_{n+1}|^Q."""
    Q = 2 * zeta.shape[-1]
    return 0.5 * np.abs(1.0 + zeta[..., -1]) ** Q


def group_multiply(u: GroupPoint, v: GroupPoint) -> GroupPoint:
    """Group law (z, t)(z', t') = (z + z', t + t' + 2 Im z.conj(z'))."""
    if u.n != v.n:
        raise InvalidParameters(f"cannot multiply points of H^{u.n} and H^{v.n}")
    z, t = multiply_arrays(u.z, u.t, v.z, v.t)
    return GroupPoint(z, t)


def group_inverse(u: GroupPoint) -> GroupPoint:
    return GroupPoint(-u.z, -u.t)


def dilate(u: GroupPoint, delta: float) -> GroupPoint:
    """Dilation (delta z, delta^2 t)."""
    if delta <= 0:
        raise InvalidParameters(f"dilation factor must be positive, got {delta}")
    return GroupPoint(delta * u.z, delta**2 * u.t)


def homogeneous_norm(u: GroupPoint) -> float:
    """(|z|^4 + t^2)^{1/4}."""
    r2 = float(np.sum(np.abs(u.z) ** 2))
    return (r2**2 + u.t**2) ** 0.25


def cayley(u: GroupPoint) -> SpherePoint:
    """Boundary Cayley transform H^n -> S^{2n+1} minus the south pole."""
    return SpherePoint(cayley_arrays(u.z, np.asarray(u.t)))


def cayley_inverse(zeta: SpherePoint) -> GroupPoint:
    z, t = cayley_inverse_arrays(zeta.zeta)
    return GroupPoint(z, float(t))


def cayley_jacobian(u: GroupPoint) -> float:
    """|J_C|(u) = 2^{Q-1} ((1 + |z|^2)^2 + t^2)^{-Q/2}."""
    return float(cayley_jacobian_arrays(u.z, np.asarray(u.t)))


def cayley_volume(radius: float = 10.0) -> float:
    """
    Integral of |J_C| over the box |z| <= radius, |t| <= radius^2 of H^1.

    Tends to |S^3| = 2 pi^2 as the box grows.
    """
    if radius <= 0:
        raise InvalidParameters(f"radius must be positive, got {radius}")

    def integrand(t: float, r: float) -> float:
        return 2.0 * math.pi * r * 8.0 * ((1.0 + r * r) ** 2 + t * t) ** (-2.0)

    value, error = integrate.dblquad(integrand, 0.0, radius, -radius**2, radius**2, epsabs=1e-11)
    logger.debug(f"Cayley volume at radius {radius}: {value:.12g} (+- {error:.1e})")
    return value


def kernel_group(params: InequalityParams, u: GroupPoint, v: GroupPoint) -> float:
    """Fundamental solution of L_s: constant * |v^{-1} u|^{s-Q}."""
    distance = homogeneous_norm(group_multiply(group_inverse(v), u))
    if distance < DIAGONAL_GUARD:
        raise SingularDiagonal(f"|v^-1 u| = {distance:.3e} is on the diagonal")
    return fractional_kernel_constant(params) * distance ** (params.s - params.Q)


def _chordal(zeta: SpherePoint, eta: SpherePoint) -> float:
    value = abs(1.0 - complex(np.vdot(eta.zeta, zeta.zeta)))
    if value < DIAGONAL_GUARD:
        raise SingularDiagonal(f"|1 - zeta.conj(eta)| = {value:.3e} is on the diagonal")
    return value


def kernel_sphere(params: InequalityParams, zeta: SpherePoint, eta: SpherePoint) -> float:
    """Kernel of A_s^{-1}: constant * |1 - zeta.conj(eta)|^{(s-Q)/2}."""
    return sphere_kernel_constant(params) * _chordal(zeta, eta) ** ((params.s - params.Q) / 2.0)


def log_kernel_sphere(zeta: SpherePoint, eta: SpherePoint, n: int = 1) -> float:
    """Kernel of A'_Q^{-1} P against the surface measure: pi^{-(n+1)} log(1/|1 - zeta.conj(eta)|)."""
    return -log_kernel_constant(n) * math.log(_chordal(zeta, eta))


def cayley_distance_factor(u: GroupPoint, v: GroupPoint) -> float:
    """
    Ratio |1 - C(u).conj(C(v))|^{1/2} / (|v^{-1}u| (|J_C(u)| |J_C(v)|)^{1/(2Q)}).

    Constant over all pairs, equal to 2^{1/Q - 1/2}.
    """
    distance = homogeneous_norm(group_multiply(group_inverse(v), u))
    if distance < DIAGONAL_GUARD:
        raise SingularDiagonal("cayley_distance_factor needs u != v")
    Q = 2 * u.n + 2
    chord = abs(1.0 - complex(np.vdot(cayley(v).zeta, cayley(u).zeta)))
    jac = (cayley_jacobian(u) * cayley_jacobian(v)) ** (1.0 / (2 * Q))
    return math.sqrt(chord) / (distance * jac)


def _funk_hecke(profile_weight: str, exponent: float, mode, scale: float) -> float:
    """
    2 pi * integral over the unit disk of F(w) R_{j,k}(conj w) dA for radial profiles around w = 1.

    Polar coordinates w = 1 - rho e^{i beta} put the kernel singularity at rho = 0;
    scipy's algebraic (and logarithmic) weights absorb it.
    """
    j, k = ModeIndex(*mode)

    def inner(beta: float) -> float:
        top = 2.0 * math.cos(beta)

        def radial(rho: float) -> float:
            w = 1.0 - rho * complex(math.cos(beta), math.sin(beta))
            return float(disk_polynomial(j, k, np.conj(w)).real)

        value, _ = integrate.quad(
            radial, 0.0, top, weight=profile_weight, wvar=(exponent, 0.0), limit=200
        )
        return value

    value, _ = integrate.quad(inner, -math.pi / 2.0, math.pi / 2.0, limit=200, epsabs=1e-13)
    return 2.0 * math.pi * scale * value


def kernel_sphere_eigenvalue(params: InequalityParams, mode) -> float:
    """
    Eigenvalue of the integral operator with kernel `kernel_sphere` on H_{j,k}, n = 1.

    Equals 1/lambda_{j,k} when the kernel realizes A_s^{-1}.
    """
    if params.n != 1:
        raise InvalidParameters("Funk-Hecke integrals are implemented on S^3 only")
    exponent = (params.s - params.Q) / 2.0 + 1.0
    return _funk_hecke("alg", exponent, mode, sphere_kernel_constant(params))


def log_kernel_eigenvalue(mode) -> float:
    """Eigenvalue of the logarithmic kernel on H_{j,k}, n = 1."""
    # log(1/rho) = -log(rho); the area element contributes one power of rho.
    return -_funk_hecke("alg-loga", 1.0, mode, log_kernel_constant(1))
