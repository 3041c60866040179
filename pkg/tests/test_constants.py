"""Test closed-form constants against an arbitrary-precision oracle."""

import math

import mpmath
import pytest

from src.crss.exceptions import InvalidParameters
from src.crss.models.params import S_GUARD, InequalityParams
from src.crss.services.constants import (
    d_operator_eigenvalue,
    d_operator_kernel_constant,
    eigenvalue,
    eigenvalue_limit,
    fractional_kernel_constant,
    iwasawa_dual_ratio,
    limit_bridge,
    limit_bridge_table,
    local_bo_ratio,
    local_dual_ratio,
    log_kernel_constant,
    sharp_constant,
    sphere_kernel_constant,
    sphere_measure,
    sublaplacian_kernel_constant,
    subspace_dimension,
    theorem_constants,
)

mpmath.mp.dps = 50

S_GRID = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5]


def oracle_eigenvalue(n, s, j, k):
    Q = 2 * n + 2
    a = mpmath.mpf(Q + s) / 4
    b = mpmath.mpf(Q - s) / 4
    return mpmath.power(2, mpmath.mpf(s) / Q) * mpmath.gamma(j + a) * mpmath.gamma(k + a) / (
        mpmath.gamma(j + b) * mpmath.gamma(k + b)
    )


def oracle_sharp_constant(n, s):
    Q = 2 * n + 2
    base = 4 * mpmath.pi ** (mpmath.mpf(Q) / 2) / mpmath.factorial(n)
    ratio = mpmath.gamma(mpmath.mpf(Q + s) / 4) / mpmath.gamma(mpmath.mpf(Q - s) / 4)
    return mpmath.power(base, mpmath.mpf(s) / Q) * ratio**2


def test_sharp_constant_golden_value():
    """C = pi/2 at n = 1, s = 2."""
    assert sharp_constant(InequalityParams(n=1, s=2.0)) == pytest.approx(math.pi / 2, rel=1e-14)


@pytest.mark.parametrize("s", S_GRID)
def test_sharp_constant_matches_oracle(s):
    """Gamma ratios through gammaln agree with 50-digit arithmetic."""
    value = sharp_constant(InequalityParams(n=1, s=s))
    assert value == pytest.approx(float(oracle_sharp_constant(1, s)), rel=1e-12)


@pytest.mark.parametrize("j", range(7))
@pytest.mark.parametrize("k", range(7))
def test_eigenvalue_golden_values(j, k):
    """lambda_{j,k} = sqrt2 (j+1/2)(k+1/2) at s = 2."""
    value = eigenvalue(InequalityParams(n=1, s=2.0), (j, k))
    assert value == pytest.approx(math.sqrt(2) * (j + 0.5) * (k + 0.5), rel=1e-12)


@pytest.mark.parametrize("s", [0.5, 1.7, 3.5])
def test_eigenvalue_matches_oracle(s):
    """Eigenvalues agree with the oracle across modes."""
    params = InequalityParams(n=1, s=s)
    for j, k in [(0, 0), (1, 0), (3, 2), (6, 6), (40, 1)]:
        assert eigenvalue(params, (j, k)) == pytest.approx(float(oracle_eigenvalue(1, s, j, k)), rel=1e-12)


def test_eigenvalue_large_mode_stays_finite():
    """Log-gamma ratios do not overflow at high degree."""
    value = eigenvalue(InequalityParams(n=1, s=3.0), (300, 300))
    assert math.isfinite(value) and value > 0


def test_eigenvalue_is_symmetric():
    """lambda_{j,k} = lambda_{k,j}."""
    params = InequalityParams(n=1, s=1.3)
    assert eigenvalue(params, (4, 1)) == pytest.approx(eigenvalue(params, (1, 4)), rel=1e-15)


@pytest.mark.parametrize("s", [0.5, 2.0, 3.5])
def test_eigenvalue_increases_in_each_index(s):
    """lambda_{j,k} grows strictly in j and in k for j, k <= 12, and lambda_{1,1} >= lambda_{2,0}."""
    params = InequalityParams(n=1, s=s)
    for j in range(13):
        for k in range(13):
            here = eigenvalue(params, (j, k))
            assert eigenvalue(params, (j + 1, k)) > here
            assert eigenvalue(params, (j, k + 1)) > here
    assert eigenvalue(params, (1, 1)) >= eigenvalue(params, (2, 0))


def test_eigenvalue_rejects_negative_index():
    """Negative bidegrees raise InvalidParameters."""
    with pytest.raises(InvalidParameters):
        eigenvalue(InequalityParams(n=1, s=2.0), (-1, 0))


@pytest.mark.parametrize("s", S_GRID)
def test_constant_identities(s):
    """lambda00 = C|S|^{-s/Q}, lambda10 = (q-1)lambda00 and the spectral-gap identities."""
    params = InequalityParams(n=1, s=s)
    Q, q = params.Q, params.q
    lam00 = eigenvalue(params, (0, 0))
    lam10 = eigenvalue(params, (1, 0))
    lam20 = eigenvalue(params, (2, 0))
    assert lam00 == pytest.approx(sharp_constant(params) * sphere_measure(1) ** (-s / Q), rel=1e-12)
    assert lam10 == pytest.approx((q - 1) * lam00, rel=1e-12)
    assert 1 - lam10 / lam20 == pytest.approx(2 * s / (Q + 4 + s), rel=1e-12)
    assert lam20 / lam10 == pytest.approx((Q + 4 + s) / (Q + 4 - s), rel=1e-12)


@pytest.mark.parametrize("j", range(1, 7))
def test_eigenvalue_limit_golden(j):
    """lambda'_j = j(j+1) for n = 1."""
    assert eigenvalue_limit(1, j) == pytest.approx(j * (j + 1), rel=1e-12)


def test_eigenvalue_limit_higher_dimension():
    """lambda'_j = j(j+1)(j+2) for n = 2."""
    assert eigenvalue_limit(2, 3) == pytest.approx(60.0, rel=1e-12)


def test_eigenvalue_limit_rejects_constants():
    """A'_Q has no eigenvalue on constants."""
    with pytest.raises(InvalidParameters):
        eigenvalue_limit(1, 0)


def test_s_out_of_range():
    """s outside (0, Q) fails validation."""
    with pytest.raises(ValueError):
        InequalityParams(n=1, s=4.0)
    with pytest.raises(ValueError):
        InequalityParams(n=1, s=0.0)
    with pytest.raises(ValueError):
        InequalityParams(n=1, s=S_GUARD / 2)


def test_s_guard_band_edges_are_accepted():
    """Only s < S_GUARD and |s - Q| < S_GUARD are rejected."""
    assert InequalityParams(n=1, s=S_GUARD).s == S_GUARD
    assert InequalityParams(n=1, s=4 - S_GUARD).q > 2


def test_d_operator_identity():
    """A_2 = 2^{2/Q} D on every mode."""
    params = InequalityParams(n=1, s=2.0)
    for j, k in [(0, 0), (2, 1), (5, 3)]:
        assert eigenvalue(params, (j, k)) == pytest.approx(
            2 ** (2 / params.Q) * d_operator_eigenvalue(1, (j, k)), rel=1e-12
        )


def test_sphere_measure_and_dimensions():
    """|S^3| = 2 pi^2 and dim H_{j,k} = j+k+1 on S^3."""
    assert sphere_measure(1) == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert subspace_dimension(1, (2, 3)) == 6
    with pytest.raises(InvalidParameters):
        subspace_dimension(2, (1, 1))


def test_theorem_constants_at_golden_exponent():
    """2s/(Q+4+s) = 0.4, dual ratio = 5 pi/6 and BO ratio = 3 at n = 1, s = 2."""
    constants = theorem_constants(InequalityParams(n=1, s=2.0))
    assert constants.fs_local == pytest.approx(0.4, rel=1e-14)
    assert constants.dual_ratio == pytest.approx(5 * math.pi / 6, rel=1e-12)
    assert constants.bo_ratio == 3.0
    assert constants.spectral_gap == pytest.approx(0.4, rel=1e-12)


def test_iwasawa_dual_ratio():
    """Heisenberg case reproduces (Q+4+s)/(Q+4-s); Euclidean case uses Q+2."""
    assert iwasawa_dual_ratio(4, 2.0, 1) == pytest.approx(10 / 6, rel=1e-14)
    assert iwasawa_dual_ratio(3, 1.0, 0) == pytest.approx(6 / 4, rel=1e-14)


def test_iwasawa_dual_ratio_rejects_bad_inputs():
    """Unknown centers and s beyond Q - 4 floor(m/2) are rejected."""
    with pytest.raises(InvalidParameters):
        iwasawa_dual_ratio(4, 1.0, 2)
    with pytest.raises(InvalidParameters):
        iwasawa_dual_ratio(10, 7.0, 3)


def test_kernel_constants_at_golden_exponent():
    """Group kernel constants equal 1/(2 pi) at n = 1, s = 2."""
    params = InequalityParams(n=1, s=2.0)
    assert fractional_kernel_constant(params) == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    assert sublaplacian_kernel_constant(1) == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    assert d_operator_kernel_constant(1) == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    assert log_kernel_constant(1) == pytest.approx(math.pi**-2, rel=1e-15)


def test_sphere_kernel_constant_matches_lowest_eigenvalue():
    """8 pi times the sphere kernel constant is 1/lambda00 = 2 sqrt2 at s = 2."""
    params = InequalityParams(n=1, s=2.0)
    assert 8 * math.pi * sphere_kernel_constant(params) == pytest.approx(2 * math.sqrt(2), rel=1e-13)


def test_local_ratios():
    """Local dual limit at (2,0) is the theorem constant; local BO ratios are 3 and 6."""
    params = InequalityParams(n=1, s=2.0)
    assert local_dual_ratio(params, (2, 0)) == pytest.approx(5 * math.pi / 6, rel=1e-12)
    assert local_bo_ratio(1, 2) == pytest.approx(3.0, rel=1e-14)
    assert local_bo_ratio(1, 3) == pytest.approx(6.0, rel=1e-14)


def test_limit_bridge_converges():
    """(4/n!) lambda^mod_{j,0}/(Q-s) tends to lambda'_j with order near 1."""
    table = limit_bridge_table(1, 2, [0.2, 0.1, 0.05, 0.025])
    assert list(table.columns) == ["gap", "value", "target", "error", "order"]
    errors = table["error"].tolist()
    assert errors == sorted(errors, reverse=True)
    assert table["order"].iloc[-1] >= 0.8
    assert limit_bridge(1, 3, 4 - 1e-4) == pytest.approx(12.0, rel=1e-3)
