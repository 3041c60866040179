"""Test distances to the extremizer manifolds."""

import math

import numpy as np
import pytest

from src.crss.exceptions import InvalidParameters, ZeroFunction
from src.crss.models.params import InequalityParams
from src.crss.services.conformal import (
    ConformalMap,
    Dilation,
    ExtremizerPoint,
    Translation,
    act_q,
    extremizer_fs,
    extremizer_hls,
)
from src.crss.services.grid import GridFunction, lp_norm
from src.crss.services.harmonics import SpectralFunction, analyze, real_mode_function, sobolev_norm_sq, synthesize
from src.crss.services.heisenberg import GroupPoint
from src.crss.services.manifold import DistanceOptions, distance_fs, distance_hls, lp_ray_projection

OPTIONS = DistanceOptions(starts=3, require_convergence=False)


def test_distance_fs_vanishes_on_manifold(basis6, params2):
    """Members of M_* have distance zero and the search recovers their chart point."""
    point = ExtremizerPoint(1.5, [0.2, 0.1j])
    F = analyze(extremizer_fs(point, params2, basis6.grid), basis6, warn=False)
    result = distance_fs(F, params2, OPTIONS)
    assert result.distance < 1e-5 * math.sqrt(sobolev_norm_sq(F, params2))
    assert result.argmin.c == pytest.approx(1.5, rel=1e-4)
    assert np.allclose(result.argmin.xi, point.xi, atol=1e-4)


def test_distance_fs_normal_perturbation(basis6, params2):
    """d(1 + eps phi) ~ eps ||phi||_* for phi in H_{2,0} + H_{0,2}."""
    eps = 1e-2
    phi = real_mode_function(basis6, (2, 0))
    F = (phi * eps).shift(1.0)
    result = distance_fs(F, params2, OPTIONS)
    assert result.distance == pytest.approx(eps * math.sqrt(sobolev_norm_sq(phi, params2)), rel=1e-2)
    assert result.distance <= math.sqrt(sobolev_norm_sq(F, params2))


def test_distance_fs_argmin_near_origin(basis6, params2):
    """For 1 + eps phi with phi orthogonal to M_* the nearest point is c = 1, xi = 0."""
    F = (real_mode_function(basis6, (2, 0)) * 1e-2).shift(1.0)
    result = distance_fs(F, params2, OPTIONS)
    assert np.linalg.norm(result.argmin.xi) <= 1e-3
    assert result.argmin.c == pytest.approx(1.0, abs=1e-3)


def test_distance_fs_grows_with_eps(basis6, params2):
    """d(1 + eps phi) increases with eps."""
    phi = real_mode_function(basis6, (1, 1))
    distances = [
        distance_fs((phi * eps).shift(1.0), params2, OPTIONS).distance for eps in (5e-3, 1e-2, 2e-2, 4e-2)
    ]
    assert all(a < b for a, b in zip(distances, distances[1:]))


def test_distance_fs_conformal_equivariance(basis8, params2):
    """d(act_q(tau, f)) = d(f) for a short word."""
    tau = ConformalMap((Dilation(1.04), Translation(GroupPoint([0.03 - 0.01j], 0.02))))
    F = (real_mode_function(basis8, (2, 0)) * 0.05).shift(1.0)
    moved = analyze(act_q(tau, F, params2), basis8, warn=False)
    assert distance_fs(moved, params2, OPTIONS).distance == pytest.approx(
        distance_fs(F, params2, OPTIONS).distance, rel=1e-4
    )


def test_distance_fs_warm_start(basis6, params2):
    """A warm start from a nearby argmin uses one start and reaches the same distance."""
    phi = real_mode_function(basis6, (2, 0))
    previous = distance_fs((phi * 2e-2).shift(1.0), params2, OPTIONS)
    F = (phi * 1e-2).shift(1.0)
    cold = distance_fs(F, params2, OPTIONS)
    warm = distance_fs(F, params2, OPTIONS, initial=previous.argmin)
    assert warm.starts_tried == 1
    assert warm.distance == pytest.approx(cold.distance, rel=1e-6)


def test_distance_fs_rejects_zero(basis6, params2):
    """The zero function has no direction to the manifold."""
    with pytest.raises(ZeroFunction):
        distance_fs(SpectralFunction.zeros(basis6), params2, OPTIONS)


def test_distance_fs_trace(basis6, params2):
    """Tracing records (start, evaluation, value) rows."""
    F = (real_mode_function(basis6, (1, 1)) * 0.05).shift(1.0)
    result = distance_fs(F, params2, DistanceOptions(starts=2, require_convergence=False, trace=True))
    frame = result.trace_frame()
    assert list(frame.columns) == ["start", "evaluation", "value"]
    assert len(frame) > 0
    assert set(frame["start"]) <= {0, 1}
    assert result.starts_tried == 2


def test_distance_hls_vanishes_on_manifold(basis6):
    """Raw extremizer values have d_p below 1e-6 |f|_p."""
    params = InequalityParams(n=1, s=1.0)
    f = extremizer_hls(ExtremizerPoint(0.7, [0.15j, -0.1]), params, basis6.grid)
    result = distance_hls(f, params, OPTIONS)
    assert result.distance < 1e-6 * lp_norm(f, params.p)


def test_distance_hls_bounded_by_norm(basis6, params2):
    """d_p(f) <= |f|_p for a mean-zero mixed mode."""
    phi = synthesize(real_mode_function(basis6, (1, 1)))
    result = distance_hls(phi, params2, OPTIONS)
    assert result.distance <= lp_norm(phi, params2.p) * (1 + 1e-12)


def test_distance_hls_accepts_spectral_input(basis6, params2):
    """Spectral and grid inputs give the same distance."""
    F = (real_mode_function(basis6, (2, 0)) * 0.05).shift(1.0)
    a = distance_hls(F, params2, OPTIONS).distance
    b = distance_hls(synthesize(F), params2, OPTIONS).distance
    assert a == pytest.approx(b, rel=1e-9)


def test_lp_ray_projection(basis6):
    """f = 3g projects to t = 3 with zero residual; p <= 1 is rejected."""
    g = GridFunction.from_points(basis6.grid, lambda z: 1 + 0.3 * np.real(z[:, 0]))
    f = GridFunction(3 * g.values, basis6.grid)
    t, value = lp_ray_projection(f, g, 1.5)
    assert t == pytest.approx(3.0, abs=1e-8)
    assert value < 1e-8
    with pytest.raises(InvalidParameters):
        lp_ray_projection(f, g, 1.0)
