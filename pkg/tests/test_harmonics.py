"""Test the bispherical harmonic basis, spectral functions, multipliers and projectors."""

import logging

import numpy as np
import pytest

from src.crss.exceptions import InvalidParameters, KernelModePresent, NotPluriharmonic
from src.crss.models.params import InequalityParams
from src.crss.services.constants import eigenvalue, sphere_measure
from src.crss.services.grid import GridFunction
from src.crss.services.harmonics import (
    GramProjector,
    SpectralFunction,
    analyze,
    apply_multiplier,
    bo_form,
    check_pluriharmonic,
    coefficients_frame,
    disk_polynomial,
    evaluate,
    gram_residual,
    limit_multiplier,
    mode_function,
    modes_up_to,
    negative_norm_sq,
    pluriharmonic_project,
    real_mode_function,
    sobolev_norm_sq,
    synthesize,
    zonal_projector,
)
from src.crss.services.sampling import make_rng, random_real_function


def test_basis_size_and_orthonormality(basis6):
    """sum over d <= B of (d+1)^2 columns, orthonormal under the quadrature."""
    assert basis6.size == sum((d + 1) ** 2 for d in range(7))
    assert gram_residual(basis6) < 1e-10


def test_modes_up_to_order():
    """Modes are listed by degree, j descending."""
    assert modes_up_to(2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_disk_polynomial_normalization():
    """R_{j,k}(1) = 1 and R_{j,k}(conj w) = conj R_{j,k}(w) for the swapped pair."""
    w = 0.3 + 0.4j
    for j, k in [(0, 0), (2, 1), (3, 3), (0, 4)]:
        assert disk_polynomial(j, k, 1.0) == pytest.approx(1.0)
        assert disk_polynomial(k, j, w) == pytest.approx(np.conj(disk_polynomial(j, k, w)))


def test_mode_functions_have_bidegree(basis6):
    """Elements of H_{j,k} pick up e^{i(j-k)theta} under the circle action."""
    rng = np.random.default_rng(3)
    raw = rng.normal(size=(5, 4))
    raw /= np.linalg.norm(raw, axis=1)[:, None]
    points = raw[:, 0::2] + 1j * raw[:, 1::2]
    phase = np.exp(0.7j)
    for mode in [(2, 1), (0, 3), (1, 1)]:
        F = mode_function(basis6, mode)
        rotated = evaluate(F, phase * points)
        assert np.allclose(rotated, phase ** (mode[0] - mode[1]) * evaluate(F, points), atol=1e-12)


def test_round_trip(basis6):
    """analyze(synthesize(F)) recovers F for band-limited F."""
    F = random_real_function(basis6, make_rng(1), degree=6)
    back = analyze(synthesize(F), basis6)
    assert np.max(np.abs(back.coefficients - F.coefficients)) < 1e-10
    assert back.reality_defect() < 1e-12


def test_evaluate_matches_synthesis(basis6):
    """Monomial evaluation at the nodes equals the tabulated synthesis."""
    F = random_real_function(basis6, make_rng(2), degree=5)
    assert np.allclose(evaluate(F, basis6.grid.nodes), synthesize(F).values, atol=1e-11)


def test_real_mode_function(basis6):
    """Real, unit L^2 norm, mean zero."""
    phi = real_mode_function(basis6, (2, 0))
    values = synthesize(phi).values
    assert phi.energy == pytest.approx(1.0)
    assert phi.reality_defect() < 1e-14
    assert np.dot(basis6.grid.weights, values**2) == pytest.approx(1.0, rel=1e-12)
    assert phi.mean == pytest.approx(0.0, abs=1e-15)
    diagonal = real_mode_function(basis6, (1, 1))
    assert diagonal.reality_defect() < 1e-14


def test_mode_function_index_check(basis6):
    """Indices outside the block are rejected."""
    with pytest.raises(InvalidParameters):
        mode_function(basis6, (1, 0), index=2)


def test_constant_and_shift(basis6):
    """SpectralFunction.constant(v) has mean v and synthesizes to v."""
    F = SpectralFunction.constant(basis6, 2.5)
    assert F.mean == pytest.approx(2.5)
    assert np.allclose(synthesize(F).values, 2.5)
    assert synthesize(F.shift(-2.5)).values == pytest.approx(np.zeros(basis6.grid.size), abs=1e-13)


def test_sobolev_norms_on_constant(basis6):
    """||1||_*^2 = lambda00 |S^3| and ||1||_{-*}^2 = |S^3|/lambda00."""
    params = InequalityParams(n=1, s=2.0)
    one = SpectralFunction.constant(basis6)
    lam00 = eigenvalue(params, (0, 0))
    assert sobolev_norm_sq(one, params) == pytest.approx(lam00 * sphere_measure(1), rel=1e-13)
    assert negative_norm_sq(one, params) == pytest.approx(sphere_measure(1) / lam00, rel=1e-13)


def test_inverse_multiplier_kernel(basis6):
    """A'_Q^{-1} drops constants, or raises in strict mode."""
    one = SpectralFunction.constant(basis6)
    assert apply_multiplier(one, limit_multiplier(), inverse=True).energy == 0.0
    with pytest.raises(KernelModePresent):
        apply_multiplier(one, limit_multiplier(), inverse=True, strict=True)


def test_pluriharmonic_checks(basis6):
    """Mixed modes are not pluriharmonic; projection removes them."""
    mixed = real_mode_function(basis6, (1, 1)) + real_mode_function(basis6, (2, 0))
    with pytest.raises(NotPluriharmonic):
        check_pluriharmonic(mixed)
    check_pluriharmonic(pluriharmonic_project(mixed))


def test_bo_form_on_mode(basis6):
    """Mean-integral form of A'_Q on a unit (2,0) mode is 6/|S^3|."""
    phi = real_mode_function(basis6, (2, 0))
    assert bo_form(phi) == pytest.approx(6.0 / sphere_measure(1), rel=1e-13)


def test_tail_energy_warning(basis6, caplog):
    """Functions beyond the band log a TailEnergy warning."""
    f = GridFunction.from_points(basis6.grid, lambda z: np.exp(3 * np.real(z[:, 0])))
    with caplog.at_level(logging.WARNING):
        F = analyze(f, basis6)
    assert "TailEnergy" in caplog.text
    assert F.tail_energy > 0


def test_zonal_and_gram_projectors_agree(basis6):
    """Both projector constructions give the same component and sum to the identity."""
    f = synthesize(random_real_function(basis6, make_rng(4), degree=3))
    total = np.zeros(basis6.grid.size, dtype=complex)
    for mode in modes_up_to(3):
        gram = GramProjector(basis6, mode).apply(f)
        zonal = zonal_projector(mode, basis6.grid).apply(f)
        assert np.max(np.abs(gram.values - zonal.values)) < 1e-9
        total += gram.values
    assert np.max(np.abs(total - f.values)) < 1e-9


def test_coefficients_frame(basis6):
    """One row per basis column keyed by (j, k, m)."""
    frame = coefficients_frame(real_mode_function(basis6, (2, 0)))
    assert list(frame.columns) == ["j", "k", "m", "re", "im"]
    assert len(frame) == basis6.size
    assert set(frame[frame["re"].abs() > 0][["j", "k"]].itertuples(index=False, name=None)) == {(2, 0), (0, 2)}



def test_analysis_matrix_is_cached_weighted_projection(basis6):
    """analyze is one product with conj(Y)^T W, built once per table."""
    F = real_mode_function(basis6, (2, 1)).shift(0.5)
    f = synthesize(F)
    direct = np.conj(basis6.values).T @ (basis6.grid.weights * f.values)
    assert basis6.analysis_matrix is basis6.analysis_matrix
    assert np.allclose(basis6.analysis_matrix @ f.values, direct, atol=1e-12)
    assert np.allclose(analyze(f, basis6).coefficients, F.coefficients, atol=1e-10)
