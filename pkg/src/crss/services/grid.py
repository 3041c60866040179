"""Quadrature grid on S^3 and nodewise grid functions."""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial.legendre import leggauss

from ..config import config
from ..exceptions import DomainViolation, InvalidParameters, ResourceLimit
from .constants import sphere_measure

logger = logging.getLogger(__name__)

# Nodewise maps that need strict positivity reject values at or below this.
POSITIVITY_FLOOR = 1e-12
# Largest imaginary part tolerated on a function flagged real.
REALITY_TOLERANCE = 1e-10

FRAME_COLUMNS = ["theta", "phi1", "phi2", "re", "im"]


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """
    Tensor grid on S^3 in Hopf coordinates.

    zeta = (cos(theta) e^{i phi1}, sin(theta) e^{i phi2}), with Gauss-Legendre
    nodes in x = cos(2 theta) and uniform nodes in each angle. The rule is
    exact for restricted monomials of total degree up to 2 * band_limit.
    """

    band_limit: int
    theta: np.ndarray
    phi: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    coordinates: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def resolution(self) -> Tuple[int, int]:
        return int(self.theta.shape[0]), int(self.phi.shape[0])

    @property
    def exactness_degree(self) -> int:
        return 2 * self.band_limit


@lru_cache(maxsize=8)
def build_grid(band_limit: int) -> SphereGrid:
    """
    Build the product quadrature grid for a band limit.

    Args:
        band_limit: Highest bidegree sum j + k to be resolved

    Returns:
        SphereGrid with (band_limit+1) x (2 band_limit+1)^2 nodes
    """
    if band_limit < 1:
        raise InvalidParameters(f"band_limit={band_limit} must be at least 1")
    if band_limit > config.MAX_BAND_LIMIT:
        raise ResourceLimit(
            f"band_limit={band_limit} exceeds the configured limit {config.MAX_BAND_LIMIT}"
        )

    x, wx = leggauss(band_limit + 1)
    theta = 0.5 * np.arccos(x)
    n_phi = 2 * band_limit + 1
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi

    th, p1, p2 = np.meshgrid(theta, phi, phi, indexing="ij")
    w = np.broadcast_to(0.25 * wx[:, None, None] * (2.0 * math.pi / n_phi) ** 2, th.shape)

    th, p1, p2, w = th.ravel(), p1.ravel(), p2.ravel(), w.ravel().copy()
    nodes = np.stack([np.cos(th) * np.exp(1j * p1), np.sin(th) * np.exp(1j * p2)], axis=1)

    grid = SphereGrid(
        band_limit=band_limit,
        theta=theta,
        phi=phi,
        nodes=nodes,
        weights=w,
        coordinates=np.stack([th, p1, p2], axis=1),
    )
    logger.info(f"Built S^3 grid: band {band_limit}, {grid.size} nodes")
    return grid


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values of a function at the nodes of a SphereGrid."""

    values: np.ndarray
    grid: SphereGrid
    real: bool = True

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != (self.grid.size,):
            raise InvalidParameters(
                f"expected {self.grid.size} node values, got shape {values.shape}"
            )
        if self.real:
            if np.iscomplexobj(values):
                imag = float(np.max(np.abs(values.imag))) if values.size else 0.0
                if imag > REALITY_TOLERANCE:
                    raise DomainViolation(f"function flagged real has |Im| up to {imag:.3e}")
                values = values.real
            values = values.astype(float, copy=False)
        else:
            values = values.astype(complex, copy=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_points(
        cls, grid: SphereGrid, func: Callable[[np.ndarray], np.ndarray], real: bool = True
    ) -> "GridFunction":
        """Tabulate func(nodes) where nodes has shape (size, 2)."""
        return cls(np.asarray(func(grid.nodes)), grid, real)

    @classmethod
    def constant(cls, grid: SphereGrid, value: float = 1.0) -> "GridFunction":
        return cls(np.full(grid.size, float(value)), grid, True)

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return multiply(self, other)

    def to_frame(self) -> pd.DataFrame:
        """Columnar layout (theta, phi1, phi2, re, im) for plotting."""
        coords = self.grid.coordinates
        values = np.asarray(self.values)
        return pd.DataFrame(
            {
                "theta": coords[:, 0],
                "phi1": coords[:, 1],
                "phi2": coords[:, 2],
                "re": values.real,
                "im": values.imag if np.iscomplexobj(values) else np.zeros(values.shape[0]),
            },
            columns=FRAME_COLUMNS,
        )

    def to_csv(self, path: str) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


def read_grid_function(path: str, grid: Optional[SphereGrid] = None) -> GridFunction:
    """
    Load a grid function written by GridFunction.to_csv.

    Args:
        path: CSV file with the columns theta, phi1, phi2, re, im
        grid: Target grid; inferred from the node count when omitted

    Returns:
        GridFunction, flagged real when the imaginary column vanishes
    """
    try:
        frame = pd.read_csv(path)
    except Exception as e:
        logger.error(f"Error reading grid function from {path}: {e}")
        raise

    missing = [c for c in FRAME_COLUMNS if c not in frame.columns]
    if missing:
        raise InvalidParameters(f"{path}: missing columns {missing}")

    if grid is None:
        grid = build_grid(_band_from_size(len(frame)))
    if len(frame) != grid.size:
        raise InvalidParameters(f"{path}: {len(frame)} rows for a grid of {grid.size} nodes")
    coords = frame[["theta", "phi1", "phi2"]].to_numpy()
    if np.max(np.abs(coords - grid.coordinates)) > 1e-9:
        raise InvalidParameters(f"{path}: node coordinates do not match band {grid.band_limit}")

    re = frame["re"].to_numpy(dtype=float)
    im = frame["im"].to_numpy(dtype=float)
    if np.max(np.abs(im)) <= REALITY_TOLERANCE:
        return GridFunction(re, grid, real=True)
    return GridFunction(re + 1j * im, grid, real=False)


def _band_from_size(size: int) -> int:
    for band in range(1, config.MAX_BAND_LIMIT + 1):
        if (band + 1) * (2 * band + 1) ** 2 == size:
            return band
    raise InvalidParameters(f"{size} nodes does not match any band-limited grid")


def _values(f) -> np.ndarray:
    return f.values if isinstance(f, GridFunction) else f


def _same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.grid is not g.grid and f.grid.band_limit != g.grid.band_limit:
        raise InvalidParameters("grid functions live on different grids")


def integrate(f: GridFunction) -> complex:
    """Quadrature sum of weight_i * value_i."""
    value = np.dot(f.grid.weights, f.values)
    return float(value) if f.real else complex(value)


def mean_integral(f: GridFunction):
    """Mean value |S^3|^{-1} * integral of f."""
    return integrate(f) / sphere_measure(1)


def lp_norm(f: GridFunction, r: float) -> float:
    """(integral |f|^r)^{1/r}."""
    if r < 1:
        raise InvalidParameters(f"L^r norm requires r >= 1, got {r}")
    return float(np.dot(f.grid.weights, np.abs(f.values) ** r) ** (1.0 / r))


def add(f: GridFunction, g) -> GridFunction:
    if isinstance(g, GridFunction):
        _same_grid(f, g)
        return GridFunction(f.values + g.values, f.grid, f.real and g.real)
    real = f.real and np.isrealobj(g)
    return GridFunction(f.values + g, f.grid, real)


def scale(f: GridFunction, factor) -> GridFunction:
    return GridFunction(f.values * factor, f.grid, f.real and np.isrealobj(factor))


def multiply(f: GridFunction, g) -> GridFunction:
    if isinstance(g, GridFunction):
        _same_grid(f, g)
        return GridFunction(f.values * g.values, f.grid, f.real and g.real)
    return scale(f, g)


def _require_positive(f: GridFunction, operation: str) -> None:
    if not f.real:
        raise DomainViolation(f"{operation} requires a real-valued function")
    low = float(np.min(f.values))
    if low <= POSITIVITY_FLOOR:
        raise DomainViolation(f"{operation} requires f > {POSITIVITY_FLOOR}, min value is {low:.3e}")


def power(f: GridFunction, exponent: float) -> GridFunction:
    """Nodewise f**exponent for strictly positive real f."""
    _require_positive(f, "power")
    return GridFunction(f.values**exponent, f.grid, True)


def log(f: GridFunction) -> GridFunction:
    _require_positive(f, "log")
    return GridFunction(np.log(f.values), f.grid, True)


def exp(f: GridFunction) -> GridFunction:
    return GridFunction(np.exp(f.values), f.grid, f.real)


def monomial_integral(alpha: Tuple[int, int], beta: Tuple[int, int]) -> float:
    """
    Exact integral over S^3 of zeta^alpha * conj(zeta)^beta.

    Nonzero only when alpha == beta, where it equals 2 pi^2 a! b! / (a+b+1)!.
    """
    if tuple(alpha) != tuple(beta):
        return 0.0
    a, b = int(alpha[0]), int(alpha[1])
    return 2.0 * math.pi**2 * math.factorial(a) * math.factorial(b) / math.factorial(a + b + 1)


def _power_pairs(degree: int):
    return [(a, b) for a in range(degree + 1) for b in range(degree + 1 - a)]


def quadrature_exactness(grid: SphereGrid, degree: Optional[int] = None) -> float:
    """
    Largest quadrature error over all restricted monomials of total degree <= degree.

    Args:
        grid: Grid under test
        degree: Total degree |alpha| + |beta|; defaults to the grid's exactness degree

    Returns:
        max |quadrature - exact| over the monomial sweep
    """
    degree = grid.exactness_degree if degree is None else degree
    pairs = _power_pairs(degree)
    z1, z2 = grid.nodes[:, 0], grid.nodes[:, 1]
    # Columns zeta_i^a conj(zeta_i)^b for every (a, b) with a + b <= degree.
    first = np.stack([z1**a * np.conj(z1) ** b for a, b in pairs], axis=1)
    second = np.stack([z2**a * np.conj(z2) ** b for a, b in pairs], axis=1)
    table = (first * grid.weights[:, None]).T @ second

    worst = 0.0
    for i, (a1, b1) in enumerate(pairs):
        for l, (a2, b2) in enumerate(pairs):
            if a1 + b1 + a2 + b2 > degree:
                continue
            exact = monomial_integral((a1, a2), (b1, b2))
            worst = max(worst, abs(table[i, l] - exact))
    logger.debug(f"Quadrature exactness at degree {degree}: max error {worst:.3e}")
    return worst
