"""Seeded random test functions in the bispherical basis."""

import logging

import numpy as np

from ..exceptions import InvalidParameters
from .harmonics import BasisTable, SpectralFunction, synthesize

logger = logging.getLogger(__name__)

RNG_NAME = "numpy.random.PCG64"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _real_draw(basis: BasisTable, rng: np.random.Generator, allowed: np.ndarray) -> np.ndarray:
    """Standard normal per real dimension on allowed columns, with the reality pairing imposed."""
    coefficients = np.zeros(basis.size, dtype=complex)
    for column in np.flatnonzero(allowed):
        partner = basis.mirror[column]
        if partner < column:
            continue
        if partner == column:
            coefficients[column] = rng.standard_normal()
        else:
            value = complex(rng.standard_normal(), rng.standard_normal())
            coefficients[column] = value
            coefficients[partner] = np.conj(value)
    return coefficients


def random_real_function(
    basis: BasisTable, rng: np.random.Generator, degree: int = 4, include_constant: bool = True
) -> SpectralFunction:
    """Real band-limited function with modes j + k <= degree."""
    if degree > basis.band_limit:
        raise InvalidParameters(f"degree {degree} exceeds band {basis.band_limit}")
    allowed = basis.col_j + basis.col_k <= degree
    if not include_constant:
        allowed &= (basis.col_j + basis.col_k) > 0
    return SpectralFunction(_real_draw(basis, rng, allowed), basis, True)


def random_positive_function(
    basis: BasisTable, rng: np.random.Generator, degree: int = 4, amplitude: float = 0.2
) -> SpectralFunction:
    """1 + amplitude * f / ||f||_inf for a random real f, positive at every node."""
    F = random_real_function(basis, rng, degree)
    sup = float(np.max(np.abs(synthesize(F).values)))
    return (F * (amplitude / sup)).shift(1.0)


def random_pluriharmonic(
    basis: BasisTable, rng: np.random.Generator, degree: int = 4, size: float = 0.3
) -> SpectralFunction:
    """Mean-zero real pluriharmonic function scaled to sup norm `size`."""
    allowed = basis.pluriharmonic_mask & (basis.col_j + basis.col_k <= degree)
    allowed &= (basis.col_j + basis.col_k) > 0
    F = SpectralFunction(_real_draw(basis, rng, allowed), basis, True)
    sup = float(np.max(np.abs(synthesize(F).values)))
    return F * (size / sup)
