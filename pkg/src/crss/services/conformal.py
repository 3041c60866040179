"""Conformal maps of S^3 built from Cayley-conjugated group generators, and their actions."""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import least_squares
from scipy.stats import unitary_group

from ..exceptions import InvalidParameters, PoleSingularity
from ..models.params import InequalityParams
from .grid import GridFunction, SphereGrid
from .harmonics import SpectralFunction, evaluate
from .heisenberg import (
    GroupPoint,
    cayley_arrays,
    cayley_inverse_arrays,
    cayley_jacobian_arrays,
    group_inverse,
    multiply_arrays,
)

logger = logging.getLogger(__name__)

XI_GUARD = 1e-6
UNITARY_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class Rotation:
    """zeta -> U zeta for a unitary U."""

    U: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U, dtype=complex)
        if U.shape != (2, 2) or np.max(np.abs(U.conj().T @ U - np.eye(2))) > UNITARY_TOLERANCE:
            raise InvalidParameters("rotation matrix must be a 2x2 unitary")
        object.__setattr__(self, "U", U)

    def inverse(self) -> "Rotation":
        return Rotation(self.U.conj().T)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "rotation", "re": self.U.real.tolist(), "im": self.U.imag.tolist()}


@dataclass(frozen=True, eq=False)
class Translation:
    """Left translation v -> u v on the group side."""

    u: GroupPoint

    def inverse(self) -> "Translation":
        return Translation(group_inverse(self.u))

    def to_dict(self) -> Dict[str, Any]:
        z = complex(self.u.z[0])
        return {"type": "translation", "z": [z.real, z.imag], "t": self.u.t}


@dataclass(frozen=True)
class Dilation:
    """Group dilation v -> delta v."""

    delta: float

    def __post_init__(self):
        if self.delta <= 0:
            raise InvalidParameters(f"dilation factor must be positive, got {self.delta}")

    def inverse(self) -> "Dilation":
        return Dilation(1.0 / self.delta)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": "dilation", "delta": self.delta}


Generator = Union[Rotation, Translation, Dilation]


@dataclass(frozen=True, eq=False)
class ConformalMap:
    """A word of generators applied left to right: word[0] acts first."""

    word: Tuple[Generator, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))

    def __len__(self) -> int:
        return len(self.word)

    def to_json(self) -> str:
        return json.dumps([g.to_dict() for g in self.word], sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ConformalMap":
        word: List[Generator] = []
        for item in json.loads(text):
            kind = item.get("type")
            if kind == "rotation":
                word.append(Rotation(np.array(item["re"]) + 1j * np.array(item["im"])))
            elif kind == "translation":
                word.append(Translation(GroupPoint([complex(*item["z"])], item["t"])))
            elif kind == "dilation":
                word.append(Dilation(item["delta"]))
            else:
                raise InvalidParameters(f"unknown generator type {kind!r}")
        return cls(tuple(word))


@dataclass(frozen=True, eq=False)
class ExtremizerPoint:
    """Chart (c, xi) of the extremizer manifolds, |xi| < 1."""

    c: float
    xi: np.ndarray

    def __post_init__(self):
        xi = np.atleast_1d(np.asarray(self.xi, dtype=complex))
        if xi.shape != (2,):
            raise InvalidParameters(f"xi must be a complex 2-vector, got shape {xi.shape}")
        radius = float(np.linalg.norm(xi))
        if radius > 1.0 - XI_GUARD:
            raise InvalidParameters(f"|xi| = {radius} exceeds 1 - {XI_GUARD}")
        if self.c == 0:
            raise InvalidParameters("extremizer scale c must be nonzero")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "c", float(self.c))


def compose(outer: ConformalMap, inner: ConformalMap) -> ConformalMap:
    """outer o inner: inner acts first."""
    return ConformalMap(inner.word + outer.word)


def inverse(tau: ConformalMap) -> ConformalMap:
    return ConformalMap(tuple(g.inverse() for g in reversed(tau.word)))


def _apply_generator(gen: Generator, zeta: np.ndarray, position: int) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(gen, Rotation):
        return zeta @ gen.U.T, np.ones(zeta.shape[0])
    try:
        z, t = cayley_inverse_arrays(zeta)
    except PoleSingularity as e:
        raise PoleSingularity(f"generator {position}: {e}", position=position) from e
    if isinstance(gen, Translation):
        z2, t2 = multiply_arrays(gen.u.z[None, :], gen.u.t, z, t)
        stretch = 1.0
    else:
        z2, t2 = gen.delta * z, gen.delta**2 * t
        stretch = gen.delta ** (2 * z.shape[-1] + 2)
    jac = cayley_jacobian_arrays(z2, t2) * stretch / cayley_jacobian_arrays(z, t)
    return cayley_arrays(z2, t2), jac


def map_points(tau: ConformalMap, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Images and Jacobians |J_tau| of sphere points.

    Args:
        tau: Conformal map
        points: Complex array of shape (P, 2)

    Returns:
        (tau(points), |J_tau|(points))
    """
    zeta = np.atleast_2d(np.asarray(points, dtype=complex))
    jac = np.ones(zeta.shape[0])
    for position, gen in enumerate(tau.word):
        zeta, step = _apply_generator(gen, zeta, position)
        jac = jac * step
    return zeta, jac


def apply_map(tau: ConformalMap, zeta: np.ndarray) -> np.ndarray:
    """tau(zeta) for one point (shape (2,)) or many (shape (P, 2))."""
    zeta = np.asarray(zeta, dtype=complex)
    images, _ = map_points(tau, zeta)
    return images[0] if zeta.ndim == 1 else images


def jacobian(tau: ConformalMap, zeta: np.ndarray):
    """|J_tau| by the chain rule through the word."""
    zeta = np.asarray(zeta, dtype=complex)
    _, jac = map_points(tau, zeta)
    return float(jac[0]) if zeta.ndim == 1 else jac


def _pullback(tau: ConformalMap, F: SpectralFunction) -> Tuple[np.ndarray, np.ndarray]:
    images, jac = map_points(tau, F.basis.grid.nodes)
    return evaluate(F, images), jac


def act_q(tau: ConformalMap, F: SpectralFunction, params: InequalityParams) -> GridFunction:
    """Sobolev action f o tau |J_tau|^{1/q}, tabulated on the basis grid."""
    values, jac = _pullback(tau, F)
    return GridFunction(values * jac ** (1.0 / params.q), F.basis.grid, F.real)


def act_p(tau: ConformalMap, F: SpectralFunction, params: InequalityParams) -> GridFunction:
    """HLS action f o tau |J_tau|^{1/p}."""
    values, jac = _pullback(tau, F)
    return GridFunction(values * jac ** (1.0 / params.p), F.basis.grid, F.real)


def act_log(tau: ConformalMap, F: SpectralFunction) -> GridFunction:
    """Logarithmic action f o tau + log |J_tau|."""
    values, jac = _pullback(tau, F)
    return GridFunction(values + np.log(jac), F.basis.grid, F.real)


def act_density(tau: ConformalMap, F: SpectralFunction) -> GridFunction:
    """Density action f o tau |J_tau|, which preserves the integral."""
    values, jac = _pullback(tau, F)
    return GridFunction(values * jac, F.basis.grid, F.real)


def log_jacobian(tau: ConformalMap, grid: SphereGrid) -> GridFunction:
    """log |J_tau| on a grid, the BO extremizer attached to tau."""
    _, jac = map_points(tau, grid.nodes)
    return GridFunction(np.log(jac), grid, True)


def _chord(point: ExtremizerPoint, grid: SphereGrid) -> np.ndarray:
    return np.abs(1.0 - grid.nodes @ np.conj(point.xi))


def extremizer_fs(point: ExtremizerPoint, params: InequalityParams, grid: SphereGrid) -> GridFunction:
    """c |1 - xi.conj(zeta)|^{-(Q-s)/2}."""
    return GridFunction(point.c * _chord(point, grid) ** (-(params.Q - params.s) / 2.0), grid, True)


def extremizer_hls(
    point: ExtremizerPoint,
    params: InequalityParams,
    grid: SphereGrid,
    exponent: Optional[float] = None,
) -> GridFunction:
    """
    c |1 - xi.conj(zeta)|^{-(Q+s)/2}.

    `exponent` overrides -(Q+s)/2, e.g. to show that -(Q+s)/4 is not extremal.
    """
    exponent = -(params.Q + params.s) / 2.0 if exponent is None else exponent
    return GridFunction(point.c * _chord(point, grid) ** exponent, grid, True)


def extremizer_bo(point: ExtremizerPoint, grid: SphereGrid, n: int = 1) -> GridFunction:
    """log c + Q log |1 - xi.conj(zeta)|^{-1}; requires c > 0."""
    if point.c <= 0:
        raise InvalidParameters("the BO extremizer needs c > 0")
    Q = 2 * n + 2
    return GridFunction(math.log(point.c) - Q * np.log(_chord(point, grid)), grid, True)


def xi_from_vector(v: Sequence[float], cap: float = 1.0 - XI_GUARD) -> np.ndarray:
    """Map R^4 onto the open unit ball of C^2 by v / sqrt(1 + |v|^2), clamped at `cap`."""
    v = np.asarray(v, dtype=float)
    xi = np.array([v[0] + 1j * v[1], v[2] + 1j * v[3]]) / math.sqrt(1.0 + float(np.dot(v, v)))
    radius = float(np.linalg.norm(xi))
    if radius > cap:
        xi = xi * (cap / radius)
    return xi


def vector_from_xi(xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=complex)
    v = xi / math.sqrt(1.0 - float(np.vdot(xi, xi).real))
    return np.array([v[0].real, v[0].imag, v[1].real, v[1].imag])


def extremizer_center(
    tau: ConformalMap, params: InequalityParams, grid: SphereGrid
) -> Tuple[ExtremizerPoint, float]:
    """
    Chart point with act_q(tau, 1) = extremizer_fs(c, xi).

    Fits log|J_tau| = (Q/2) log(1 - |xi|^2) - Q log|1 - xi.conj(zeta)| by least squares.

    Returns:
        (ExtremizerPoint, max absolute residual of the log fit)
    """
    Q = params.Q
    _, jac = map_points(tau, grid.nodes)
    target = np.log(jac)

    def residual(v: np.ndarray) -> np.ndarray:
        xi = xi_from_vector(v)
        radius2 = float(np.vdot(xi, xi).real)
        chord = np.abs(1.0 - grid.nodes @ np.conj(xi))
        return 0.5 * Q * math.log(1.0 - radius2) - Q * np.log(chord) - target

    fit = least_squares(residual, np.zeros(4), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    xi = xi_from_vector(fit.x)
    c = (1.0 - float(np.vdot(xi, xi).real)) ** ((Q - params.s) / 4.0)
    worst = float(np.max(np.abs(fit.fun)))
    logger.debug(f"Extremizer center fit: |xi|={np.linalg.norm(xi):.6f}, residual {worst:.2e}")
    return ExtremizerPoint(c, xi), worst


def random_word(
    rng: np.random.Generator,
    length: int = 3,
    dilation_range: Tuple[float, float] = (0.85, 1.18),
    translation_scale: float = 0.25,
) -> ConformalMap:
    """
    Random word of rotations, translations and dilations.

    Translations have |z| <= scale and |t| <= scale; dilations are log-uniform
    in dilation_range.
    """
    lo, hi = dilation_range
    if not 0 < lo <= hi:
        raise InvalidParameters(f"bad dilation range {dilation_range}")
    word: List[Generator] = []
    for _ in range(length):
        kind = int(rng.integers(3))
        if kind == 0:
            word.append(Rotation(unitary_group.rvs(2, random_state=rng)))
        elif kind == 1:
            radius = translation_scale * math.sqrt(float(rng.uniform()))
            angle = float(rng.uniform(0.0, 2.0 * math.pi))
            t = float(rng.uniform(-translation_scale, translation_scale))
            word.append(Translation(GroupPoint([radius * complex(math.cos(angle), math.sin(angle))], t)))
        else:
            word.append(Dilation(math.exp(float(rng.uniform(math.log(lo), math.log(hi))))))
    return ConformalMap(tuple(word))
