"""
Bispherical harmonic analysis on S^3.

The basis of each H_{j,k} is built by Gram-Schmidt on restricted monomials of
bidegree (j, k) against the lower blocks of its chain (j-i, k-i). Every basis
function is also kept as a coefficient vector over the global monomial list,
so band-limited functions can be evaluated at arbitrary sphere points.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.special import eval_jacobi

from ..config import config
from ..exceptions import InvalidParameters, KernelModePresent, NotPluriharmonic, RankDeficiency
from ..models.params import InequalityParams, ModeIndex
from .constants import (
    eigenvalue,
    eigenvalue_limit,
    modified_eigenvalue,
    sphere_measure,
    subspace_dimension,
)
from .grid import GridFunction, SphereGrid, build_grid

logger = logging.getLogger(__name__)

# Relative singular value below which a residual monomial direction counts as dependent.
RANK_TOLERANCE = 1e-9
# Energy allowed on modes that an operation must not see.
MODE_ENERGY_TOLERANCE = 1e-10

Multiplier = Callable[[ModeIndex], float]

_EVAL_CHUNK = 2048


def monomial_exponents(band_limit: int) -> np.ndarray:
    """Exponents (a1, a2, b1, b2) of zeta1^a1 zeta2^a2 conj(zeta1)^b1 conj(zeta2)^b2, bidegree <= band."""
    rows = []
    for degree in range(band_limit + 1):
        for j in range(degree, -1, -1):
            k = degree - j
            for a1 in range(j + 1):
                for b1 in range(k + 1):
                    rows.append((a1, j - a1, b1, k - b1))
    return np.array(rows, dtype=int)


def monomial_matrix(points: np.ndarray, exponents: np.ndarray) -> np.ndarray:
    """Evaluate the monomials listed in `exponents` at points of shape (P, 2)."""
    top = int(exponents.max()) if exponents.size else 0
    orders = np.arange(top + 1)
    z1 = points[:, 0][:, None] ** orders
    z2 = points[:, 1][:, None] ** orders
    return (
        z1[:, exponents[:, 0]]
        * z2[:, exponents[:, 1]]
        * np.conj(z1)[:, exponents[:, 2]]
        * np.conj(z2)[:, exponents[:, 3]]
    )


def disk_polynomial(j: int, k: int, w) -> np.ndarray:
    """
    Disk polynomial R_{j,k}(w) normalized by R_{j,k}(1) = 1.

    R_{j,k}(r e^{i psi}) = r^{|j-k|} e^{i(j-k)psi} P^{(0,|j-k|)}_{min(j,k)}(2r^2 - 1)
    """
    w = np.asarray(w, dtype=complex)
    m, low = abs(j - k), min(j, k)
    angular = w ** (j - k) if j >= k else np.conj(w) ** (k - j)
    return angular * eval_jacobi(low, 0, m, 2.0 * np.abs(w) ** 2 - 1.0)


@dataclass(frozen=True, eq=False)
class BasisTable:
    """Orthonormal bases of every H_{j,k} with j + k <= band_limit, tabulated on a grid."""

    grid: SphereGrid
    band_limit: int
    modes: Tuple[ModeIndex, ...]
    offsets: Dict[ModeIndex, Tuple[int, int]]
    values: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)
    exponents: np.ndarray = field(repr=False)
    col_j: np.ndarray = field(repr=False)
    col_k: np.ndarray = field(repr=False)
    mirror: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.values.shape[1])

    def columns(self, mode) -> slice:
        start, stop = self.offsets[ModeIndex(*mode)]
        return slice(start, stop)

    def block_values(self, mode) -> np.ndarray:
        return self.values[:, self.columns(mode)]

    @property
    def pluriharmonic_mask(self) -> np.ndarray:
        return (self.col_j == 0) | (self.col_k == 0)

    @cached_property
    def analysis_matrix(self) -> np.ndarray:
        """Quadrature-weighted conjugate transpose of the table, so analysis is one mat-vec."""
        return np.ascontiguousarray(np.conj(self.values).T * self.grid.weights[None, :])


def _inner(weights: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    return np.conj(left).T @ (weights[:, None] * right)


def _conjugate_coefficients(coef: np.ndarray, conj_perm: np.ndarray) -> np.ndarray:
    out = np.zeros_like(coef)
    out[conj_perm] = np.conj(coef)
    return out


def build_basis(grid: SphereGrid, band_limit: Optional[int] = None) -> BasisTable:
    """
    Construct orthonormal bases of H_{j,k} for j + k <= band_limit.

    Args:
        grid: Quadrature grid with exactness degree >= 2 * band_limit
        band_limit: Defaults to the grid's band limit

    Returns:
        BasisTable

    Raises:
        RankDeficiency: a block's detected dimension differs from j + k + 1
    """
    band_limit = grid.band_limit if band_limit is None else band_limit
    if band_limit < 0 or 2 * band_limit > grid.exactness_degree:
        raise InvalidParameters(
            f"band_limit={band_limit} needs exactness degree {2 * band_limit}, grid has {grid.exactness_degree}"
        )

    w = grid.weights
    exponents = monomial_exponents(band_limit)
    index = {tuple(e): i for i, e in enumerate(exponents)}
    conj_perm = np.array([index[(e[2], e[3], e[0], e[1])] for e in exponents], dtype=int)
    n_mono = exponents.shape[0]

    blocks: Dict[ModeIndex, Tuple[np.ndarray, np.ndarray]] = {}

    for degree in range(band_limit + 1):
        for j in range(degree, (degree - 1) // 2, -1):
            k = degree - j
            if j < k:
                continue
            mode = ModeIndex(j, k)
            dim = subspace_dimension(1, mode)

            mono_cols = [index[(a1, j - a1, b1, k - b1)] for a1 in range(j + 1) for b1 in range(k + 1)]
            X = monomial_matrix(grid.nodes, exponents[mono_cols])
            Xc = np.zeros((n_mono, len(mono_cols)), dtype=complex)
            Xc[mono_cols, np.arange(len(mono_cols))] = 1.0

            chain = [blocks[ModeIndex(j - i, k - i)] for i in range(1, k + 1)]
            if chain:
                chain_vals = np.hstack([c[0] for c in chain])
                chain_coef = np.hstack([c[1] for c in chain])
                for _ in range(2):
                    proj = _inner(w, chain_vals, X)
                    X = X - chain_vals @ proj
                    Xc = Xc - chain_coef @ proj

            singular = np.linalg.svd(np.sqrt(w)[:, None] * X, compute_uv=False)
            rank = int(np.sum(singular > RANK_TOLERANCE * singular[0]))
            if rank != dim:
                raise RankDeficiency(f"H_{j},{k}: detected dimension {rank}, expected {dim}")

            vals = np.zeros((grid.size, dim), dtype=complex)
            coef = np.zeros((n_mono, dim), dtype=complex)
            for i in range(dim):
                m1 = i - k
                if j == k and m1 < 0:
                    continue
                seed = (m1, j - m1, 0, k) if m1 >= 0 else (0, j, -m1, k + m1)
                col = mono_cols.index(index[seed])
                v, c = X[:, col].copy(), Xc[:, col].copy()
                for _ in range(2):
                    if i > 0:
                        proj = _inner(w, vals[:, :i], v[:, None])[:, 0]
                        v = v - vals[:, :i] @ proj
                        c = c - coef[:, :i] @ proj
                norm = math.sqrt(float(np.dot(w, np.abs(v) ** 2)))
                v, c = v / norm, c / norm
                if j == k and m1 == 0:
                    peak = v[np.argmax(np.abs(v))]
                    phase = np.conj(peak) / abs(peak)
                    v, c = (v * phase).real.astype(complex), (c * phase).real.astype(complex)
                vals[:, i], coef[:, i] = v, c

            if j == k:
                for i in range(k):
                    vals[:, i] = np.conj(vals[:, dim - 1 - i])
                    coef[:, i] = _conjugate_coefficients(coef[:, dim - 1 - i], conj_perm)
            blocks[mode] = (vals, coef)

            if j > k:
                mirror_vals = np.conj(vals[:, ::-1])
                mirror_coef = np.stack(
                    [_conjugate_coefficients(coef[:, dim - 1 - i], conj_perm) for i in range(dim)],
                    axis=1,
                )
                blocks[ModeIndex(k, j)] = (mirror_vals, mirror_coef)

    modes = tuple(
        ModeIndex(j, d - j) for d in range(band_limit + 1) for j in range(d, -1, -1)
    )
    offsets, start = {}, 0
    for mode in modes:
        dim = subspace_dimension(1, mode)
        offsets[mode] = (start, start + dim)
        start += dim

    values = np.hstack([blocks[m][0] for m in modes])
    coefficients = np.hstack([blocks[m][1] for m in modes])
    col_j = np.concatenate([np.full(subspace_dimension(1, m), m.j) for m in modes])
    col_k = np.concatenate([np.full(subspace_dimension(1, m), m.k) for m in modes])
    mirror = np.empty(start, dtype=int)
    for mode in modes:
        lo, hi = offsets[mode]
        mlo, _ = offsets[ModeIndex(mode.k, mode.j)]
        dim = hi - lo
        mirror[lo:hi] = mlo + (dim - 1 - np.arange(dim))

    logger.info(f"Built bispherical basis: band {band_limit}, {start} functions on {grid.size} nodes")
    return BasisTable(
        grid=grid,
        band_limit=band_limit,
        modes=modes,
        offsets=offsets,
        values=values,
        coefficients=coefficients,
        exponents=exponents,
        col_j=col_j,
        col_k=col_k,
        mirror=mirror,
    )


@lru_cache(maxsize=4)
def load_basis(band_limit: Optional[int] = None) -> BasisTable:
    """Basis on the standard grid of the same band limit (cached)."""
    band_limit = config.BAND_LIMIT if band_limit is None else band_limit
    return build_basis(build_grid(band_limit), band_limit)


def gram_residual(basis: BasisTable) -> float:
    """max |<Y_a, Y_b> - delta_ab| over the whole table."""
    gram = _inner(basis.grid.weights, basis.values, basis.values)
    return float(np.max(np.abs(gram - np.eye(basis.size))))


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """Coefficients of a band-limited function in the basis of a BasisTable."""

    coefficients: np.ndarray
    basis: BasisTable
    real: bool = True
    tail_energy: float = 0.0

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=complex)
        if coefficients.shape != (self.basis.size,):
            raise InvalidParameters(
                f"expected {self.basis.size} coefficients, got shape {coefficients.shape}"
            )
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def zeros(cls, basis: BasisTable) -> "SpectralFunction":
        return cls(np.zeros(basis.size, dtype=complex), basis, True)

    @classmethod
    def constant(cls, basis: BasisTable, value: float = 1.0) -> "SpectralFunction":
        coefficients = np.zeros(basis.size, dtype=complex)
        coefficients[0] = value * math.sqrt(sphere_measure(1))
        return cls(coefficients, basis, True)

    def block(self, mode) -> np.ndarray:
        return self.coefficients[self.basis.columns(mode)]

    @property
    def blocks(self) -> Dict[ModeIndex, np.ndarray]:
        return {mode: self.block(mode) for mode in self.basis.modes}

    @property
    def mean(self) -> float:
        """Mean integral of the function."""
        return float(self.coefficients[0].real) / math.sqrt(sphere_measure(1))

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def reality_defect(self) -> float:
        """max |F[mirror] - conj(F)|; zero for real functions."""
        return float(np.max(np.abs(self.coefficients[self.basis.mirror] - np.conj(self.coefficients))))

    def _with(self, coefficients: np.ndarray, real: bool) -> "SpectralFunction":
        return SpectralFunction(coefficients, self.basis, real)

    def __add__(self, other):
        if isinstance(other, SpectralFunction):
            return self._with(self.coefficients + other.coefficients, self.real and other.real)
        return self.shift(other)

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, factor):
        return self._with(self.coefficients * factor, self.real and np.isrealobj(factor))

    __rmul__ = __mul__

    def shift(self, value: float) -> "SpectralFunction":
        """Add a constant."""
        coefficients = self.coefficients.copy()
        coefficients[0] += value * math.sqrt(sphere_measure(1))
        return self._with(coefficients, self.real and np.isrealobj(value))


def analyze(f: GridFunction, basis: BasisTable, warn: bool = True) -> SpectralFunction:
    """
    Project a grid function onto the band-limited basis.

    Logs a TailEnergy warning when the unresolved energy exceeds the configured
    fraction of the total (unless warn=False, for inputs known not to be band-limited).
    """
    if f.grid.size != basis.grid.size:
        raise InvalidParameters("grid function and basis use different grids")
    coefficients = basis.analysis_matrix @ f.values
    if f.real:
        coefficients = 0.5 * (coefficients + np.conj(coefficients[basis.mirror]))

    total = float(np.dot(basis.grid.weights, np.abs(f.values) ** 2))
    tail = total - float(np.sum(np.abs(coefficients) ** 2))
    if warn and total > 0 and tail > config.TAIL_FRACTION * total:
        logger.warning(f"TailEnergy: {tail:.3e} of {total:.3e} outside band {basis.band_limit}")
    return SpectralFunction(coefficients, basis, f.real, tail_energy=tail)


def synthesize(F: SpectralFunction) -> GridFunction:
    """Grid values of a spectral function."""
    return GridFunction(F.basis.values @ F.coefficients, F.basis.grid, F.real)


def evaluate(F: SpectralFunction, points: np.ndarray) -> np.ndarray:
    """
    Evaluate a spectral function at arbitrary sphere points.

    Args:
        F: Spectral function
        points: Complex array of shape (P, 2) with unit rows

    Returns:
        Values, real when F is flagged real
    """
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    monomial_coef = F.basis.coefficients @ F.coefficients
    out = np.empty(points.shape[0], dtype=complex)
    for start in range(0, points.shape[0], _EVAL_CHUNK):
        chunk = points[start : start + _EVAL_CHUNK]
        out[start : start + _EVAL_CHUNK] = monomial_matrix(chunk, F.basis.exponents) @ monomial_coef
    return out.real if F.real else out


def mode_function(basis: BasisTable, mode, index: int = 0) -> SpectralFunction:
    """The basis function number `index` of H_{j,k}."""
    cols = basis.columns(mode)
    if not 0 <= index < cols.stop - cols.start:
        raise InvalidParameters(f"index {index} outside H_{mode[0]},{mode[1]}")
    coefficients = np.zeros(basis.size, dtype=complex)
    coefficients[cols.start + index] = 1.0
    return SpectralFunction(coefficients, basis, real=False)


def real_mode_function(basis: BasisTable, mode, index: Optional[int] = None) -> SpectralFunction:
    """
    A real function of unit L^2 norm in H_{j,k} + H_{k,j}.

    The default index picks the real zero-frequency element when j == k.
    """
    j, k = int(mode[0]), int(mode[1])
    cols = basis.columns((j, k))
    if index is None:
        index = k if j == k else 0
    column = cols.start + index
    partner = basis.mirror[column]
    coefficients = np.zeros(basis.size, dtype=complex)
    if partner == column:
        coefficients[column] = 1.0
    else:
        coefficients[column] = coefficients[partner] = 1.0 / math.sqrt(2.0)
    return SpectralFunction(coefficients, basis, real=True)


def coefficients_frame(F: SpectralFunction) -> pd.DataFrame:
    """Coefficient dump keyed by (j, k, m)."""
    rows = []
    for mode in F.basis.modes:
        for m, value in enumerate(F.block(mode)):
            rows.append({"j": mode.j, "k": mode.k, "m": m, "re": value.real, "im": value.imag})
    return pd.DataFrame(rows, columns=["j", "k", "m", "re", "im"])


def fractional_multiplier(params: InequalityParams, power: float = 1.0) -> Multiplier:
    """lambda_{j,k}**power, the symbol of A_s**power."""
    return lambda mode: eigenvalue(params, mode) ** power


def modified_multiplier(params: InequalityParams) -> Multiplier:
    return lambda mode: modified_eigenvalue(params, mode)


def limit_multiplier(n: int = 1) -> Multiplier:
    """Symbol of A'_Q: lambda'_j on H_{j,0} and H_{0,j}, zero elsewhere."""

    def symbol(mode: ModeIndex) -> float:
        j, k = mode
        if (j == 0) == (k == 0):
            return 0.0
        return eigenvalue_limit(n, max(j, k))

    return symbol


def multiplier_vector(basis: BasisTable, mu: Multiplier) -> np.ndarray:
    """Column-wise symbol values."""
    vec = np.empty(basis.size)
    for mode in basis.modes:
        vec[basis.columns(mode)] = mu(mode)
    return vec


def apply_multiplier(
    F: SpectralFunction, mu: Multiplier, inverse: bool = False, strict: bool = False
) -> SpectralFunction:
    """
    Scale every block by its symbol value, or divide by it.

    Inverse multipliers drop modes where the symbol vanishes; with strict=True a
    nonzero coefficient on such a mode raises KernelModePresent instead.
    """
    vec = multiplier_vector(F.basis, mu)
    if not inverse:
        return SpectralFunction(F.coefficients * vec, F.basis, F.real)

    kernel = vec == 0.0
    out = np.zeros_like(F.coefficients)
    if np.any(kernel):
        leaked = float(np.sum(np.abs(F.coefficients[kernel]) ** 2))
        if strict and leaked > MODE_ENERGY_TOLERANCE:
            raise KernelModePresent(f"inverse multiplier met energy {leaked:.3e} on its kernel")
    out[~kernel] = F.coefficients[~kernel] / vec[~kernel]
    return SpectralFunction(out, F.basis, F.real)


def sobolev_norm_sq(F: SpectralFunction, params: InequalityParams) -> float:
    """||f||_*^2 = sum lambda_{j,k} |F_{j,k}|^2."""
    vec = multiplier_vector(F.basis, fractional_multiplier(params))
    return float(np.dot(vec, np.abs(F.coefficients) ** 2))


def negative_norm_sq(F: SpectralFunction, params: InequalityParams) -> float:
    """||f||_{-*}^2 = <f, A_s^{-1} f>."""
    vec = multiplier_vector(F.basis, fractional_multiplier(params))
    return float(np.dot(1.0 / vec, np.abs(F.coefficients) ** 2))


def pluriharmonic_energy(F: SpectralFunction) -> float:
    """Energy carried by modes with j >= 1 and k >= 1."""
    return float(np.sum(np.abs(F.coefficients[~F.basis.pluriharmonic_mask]) ** 2))


def check_pluriharmonic(F: SpectralFunction) -> None:
    leaked = pluriharmonic_energy(F)
    if leaked > MODE_ENERGY_TOLERANCE * max(1.0, F.energy):
        raise NotPluriharmonic(f"energy {leaked:.3e} outside the pluriharmonic modes")


def bo_form(F: SpectralFunction) -> float:
    """Mean-integral quadratic form of A'_Q on a pluriharmonic function."""
    check_pluriharmonic(F)
    vec = multiplier_vector(F.basis, limit_multiplier(1))
    return float(np.dot(vec, np.abs(F.coefficients) ** 2)) / sphere_measure(1)


def pluriharmonic_project(F: SpectralFunction) -> SpectralFunction:
    """Zero all blocks with j >= 1 and k >= 1."""
    coefficients = np.where(F.basis.pluriharmonic_mask, F.coefficients, 0.0)
    return SpectralFunction(coefficients, F.basis, F.real)


class GramProjector:
    """Orthogonal projector onto H_{j,k} built from the tabulated basis."""

    def __init__(self, basis: BasisTable, mode):
        self.basis = basis
        self.mode = ModeIndex(*mode)
        self._block = basis.block_values(self.mode)

    def apply(self, f: GridFunction) -> GridFunction:
        coefficients = np.conj(self._block).T @ (self.basis.grid.weights * f.values)
        return GridFunction(self._block @ coefficients, f.grid, real=False)


class ZonalProjector:
    """
    Projector onto H_{j,k} through its zonal reproducing kernel.

    K(zeta, eta) = (dim H_{j,k} / |S^3|) R_{j,k}(zeta . conj(eta))
    """

    _ROWS = 512

    def __init__(self, mode, grid: SphereGrid):
        self.mode = ModeIndex(*mode)
        self.grid = grid
        self._scale = subspace_dimension(1, self.mode) / sphere_measure(1)

    def kernel(self, zeta: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """Kernel matrix between point sets of shapes (P, 2) and (R, 2)."""
        w = np.atleast_2d(zeta) @ np.conj(np.atleast_2d(eta)).T
        return self._scale * disk_polynomial(self.mode.j, self.mode.k, w)

    def apply(self, f: GridFunction) -> GridFunction:
        weighted = self.grid.weights * f.values
        out = np.empty(self.grid.size, dtype=complex)
        for start in range(0, self.grid.size, self._ROWS):
            rows = self.grid.nodes[start : start + self._ROWS]
            out[start : start + self._ROWS] = self.kernel(rows, self.grid.nodes) @ weighted
        return GridFunction(out, f.grid, real=False)


def zonal_projector(mode, grid: SphereGrid) -> ZonalProjector:
    return ZonalProjector(mode, grid)


def modes_up_to(band_limit: int) -> List[ModeIndex]:
    return [ModeIndex(j, d - j) for d in range(band_limit + 1) for j in range(d, -1, -1)]
