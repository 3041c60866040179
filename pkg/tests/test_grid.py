"""Test the S^3 quadrature grid and grid-function operations."""

import math

import numpy as np
import pytest

from src.crss.exceptions import DomainViolation, InvalidParameters, ResourceLimit
from src.crss.services.grid import (
    GridFunction,
    build_grid,
    exp,
    integrate,
    log,
    lp_norm,
    mean_integral,
    monomial_integral,
    power,
    quadrature_exactness,
    read_grid_function,
)


def test_grid_shape_and_measure():
    """(B+1)(2B+1)^2 nodes on the unit sphere with weights summing to 2 pi^2."""
    grid = build_grid(4)
    assert grid.size == 5 * 81
    assert grid.resolution == (5, 9)
    assert np.allclose(np.sum(np.abs(grid.nodes) ** 2, axis=1), 1.0)
    assert np.sum(grid.weights) == pytest.approx(2 * math.pi**2, rel=1e-14)


def test_grid_is_cached():
    """Repeated builds return the same object."""
    assert build_grid(5) is build_grid(5)


def test_grid_limits():
    """Band limits below 1 or above the configured cap are rejected."""
    with pytest.raises(InvalidParameters):
        build_grid(0)
    with pytest.raises(ResourceLimit):
        build_grid(10_000)


def test_monomial_integral_closed_form():
    """|zeta_1|^2 integrates to pi^2 and off-diagonal monomials vanish."""
    assert monomial_integral((1, 0), (1, 0)) == pytest.approx(math.pi**2)
    assert monomial_integral((0, 0), (0, 0)) == pytest.approx(2 * math.pi**2)
    assert monomial_integral((1, 0), (0, 1)) == 0.0


@pytest.mark.parametrize("band", [4, 8])
def test_quadrature_exactness_up_to_twice_band(band):
    """All monomials of total degree <= 2B integrate exactly."""
    grid = build_grid(band)
    assert quadrature_exactness(grid) < 1e-12


def test_quadrature_fails_beyond_exactness_degree():
    """Degree 2B+1 aliases the angular rule."""
    grid = build_grid(4)
    assert quadrature_exactness(grid, degree=9) > 1e-3


def test_integrals_and_norms():
    """Constants integrate to |S^3|, have mean 1 and L^2 norm sqrt(|S^3|)."""
    grid = build_grid(4)
    one = GridFunction.constant(grid)
    assert integrate(one) == pytest.approx(2 * math.pi**2, rel=1e-14)
    assert mean_integral(one) == pytest.approx(1.0, rel=1e-14)
    assert lp_norm(one, 2.0) == pytest.approx(math.sqrt(2) * math.pi, rel=1e-14)
    with pytest.raises(InvalidParameters):
        lp_norm(one, 0.5)


def test_arithmetic_preserves_reality():
    """Adding a complex function drops the real flag."""
    grid = build_grid(3)
    f = GridFunction.from_points(grid, lambda z: np.abs(z[:, 0]) ** 2)
    g = GridFunction.from_points(grid, lambda z: z[:, 0], real=False)
    assert (f + 1.0).real
    assert not (f + g).real
    assert (f * 2.0).values == pytest.approx(2 * f.values)


def test_real_flag_rejects_imaginary_values():
    """A function flagged real may not carry an imaginary part."""
    grid = build_grid(3)
    with pytest.raises(DomainViolation):
        GridFunction(np.full(grid.size, 1j), grid, real=True)


def test_value_count_must_match_grid():
    """Wrong-length value arrays are rejected."""
    grid = build_grid(3)
    with pytest.raises(InvalidParameters):
        GridFunction(np.ones(grid.size + 1), grid)


def test_log_and_power_need_positive_values():
    """Nodewise log and power reject values at the positivity floor."""
    grid = build_grid(3)
    f = GridFunction.from_points(grid, lambda z: np.real(z[:, 0]))
    with pytest.raises(DomainViolation):
        log(f)
    with pytest.raises(DomainViolation):
        power(f, 0.5)
    g = exp(f)
    assert np.allclose(log(g).values, f.values)
    assert np.allclose(power(g, 2.0).values, np.exp(2 * f.values))


def test_csv_round_trip(tmp_path):
    """to_csv and read_grid_function restore values and infer the band."""
    grid = build_grid(3)
    f = GridFunction.from_points(grid, lambda z: 1 + np.real(z[:, 0] * np.conj(z[:, 1])))
    path = tmp_path / "f.csv"
    f.to_csv(str(path))
    back = read_grid_function(str(path))
    assert back.grid.band_limit == 3
    assert back.real
    assert np.allclose(back.values, f.values, atol=1e-15)


def test_read_grid_function_checks_columns(tmp_path):
    """Files without the documented columns are rejected."""
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidParameters):
        read_grid_function(str(path))
