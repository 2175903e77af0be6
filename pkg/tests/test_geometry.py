import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose
from scipy.linalg import expm

from heatlab.errors import DegreeError, DomainError
from heatlab.geometry.curvature import curvature_at, frame_riemann, riemann, riemann_from_metric, symmetry_residual
from heatlab.geometry.exterior import compound, derivation, form_dimension, hodge_star, wedge_matrices
from heatlab.geometry.manifolds import geodesic_distance, manifold_from_spec, sphere2
from heatlab.geometry.volume import ball_volume, ball_volumes, unit_ball_volume
from heatlab.geometry.weitzenboeck import potential_sup, underline_potential, weitzenboeck_at

POINTS = {"flat_torus": [0.3, 5.9], "sphere2": [1.2, 0.3], "hyperbolic_patch": [0.2, -0.35]}


def test_manifold_names_and_volumes(torus, sphere, hyperbolic):
    assert torus.name == "flat_torus2"
    assert sphere2(2.0).name == "sphere2_r2"
    assert hyperbolic.name == "hyperbolic_patch_b0.9"
    assert_allclose(torus.total_volume, (2 * np.pi) ** 2)
    assert_allclose(sphere.total_volume, 4 * np.pi)
    assert hyperbolic.compact is False


def test_manifold_from_spec_rejects_unknown_input():
    assert manifold_from_spec({"kind": "flat_torus", "dimension": 1}).dimension == 1
    with pytest.raises(ValueError):
        manifold_from_spec({"kind": "klein_bottle"})
    with pytest.raises(ValueError):
        manifold_from_spec({"kind": "sphere2", "radius": 1.0, "bound": 0.5})


def test_check_domain(sphere, hyperbolic):
    with pytest.raises(DomainError):
        sphere.check_domain([0.0, 1.0])
    with pytest.raises(DomainError):
        hyperbolic.check_domain([0.95, 0.0])
    with pytest.raises(DomainError):
        hyperbolic.check_domain([0.1, 0.1, 0.1])


def test_riemann_closed_form_matches_metric_assembly(catalog):
    x = np.array(POINTS[catalog.kind])
    R = riemann(catalog, x)
    assert_allclose(riemann_from_metric(catalog, x), R, atol=1e-9 * max(1.0, np.abs(R).max()))
    assert symmetry_residual(R) < 1e-9 * max(1.0, np.abs(R).max())


def test_frame_curvature_is_sectional(catalog):
    pack = curvature_at(catalog, POINTS[catalog.kind])
    assert_allclose(pack.riemann_frame, frame_riemann(catalog), atol=1e-10)
    assert pack.nabla_riem_norm == 0.0


def test_first_potential_is_ricci(catalog):
    data = weitzenboeck_at(catalog, POINTS[catalog.kind], 1)
    assert_allclose(data.V, catalog.sectional_curvature * np.eye(2), atol=1e-12)
    assert_allclose(data.lower_bound, catalog.sectional_curvature, atol=1e-12)


def test_scalar_and_top_degree_potentials_vanish(catalog):
    assert_allclose(weitzenboeck_at(catalog, POINTS[catalog.kind], 0).V, 0.0)
    assert_allclose(weitzenboeck_at(catalog, POINTS[catalog.kind], 2).V, 0.0, atol=1e-12)
    assert potential_sup(catalog, 2) < 1e-12


def test_underline_potential_rejects_unknown_coupling(sphere):
    with pytest.raises(ValueError):
        underline_potential(frame_riemann(sphere), 1, coupling="other")


def test_literal_and_implemented_couplings_agree_on_flat_space(torus):
    R = frame_riemann(torus)
    assert_allclose(underline_potential(R, 1, "implemented"), underline_potential(R, 1, "literal"))


@pytest.mark.parametrize("length", [0.1, 0.7, 1.5])
def test_exp_moves_by_vector_length(catalog, length):
    x = np.array(POINTS[catalog.kind])
    for angle in (0.3, 2.0, 4.1):
        v = length * np.array([np.cos(angle), np.sin(angle)])
        assert_allclose(geodesic_distance(catalog, x, catalog.exp(x, v)), length, rtol=1e-9)


def test_torus_distance_wraps(torus):
    assert_allclose(geodesic_distance(torus, [0.1, 0.0], [2 * np.pi - 0.1, 0.0]), 0.2, atol=1e-12)


def test_ball_volumes_closed_forms(torus, sphere, hyperbolic):
    assert_allclose(ball_volume(torus, [1.0, 1.0], 0.5), np.pi * 0.25)
    assert_allclose(ball_volume(torus, [1.0, 1.0], 10.0), torus.total_volume)
    assert_allclose(ball_volume(sphere, [1.0, 1.0], np.pi), 4 * np.pi)
    assert_allclose(ball_volume(sphere, [1.0, 1.0], 0.4), 2 * np.pi * (1 - np.cos(0.4)))
    assert_allclose(ball_volume(hyperbolic, [0.0, 0.0], 1.0), 2 * np.pi * (np.cosh(1.0) - 1.0))


def test_torus_ball_between_half_period_and_diagonal(torus):
    # the disc leaves the fundamental square without covering it
    value = ball_volume(torus, [0.0, 0.0], 3.5)
    assert 0 < value < torus.total_volume
    assert value < np.pi * 3.5 ** 2


def test_hyperbolic_ball_saturates_at_patch(hyperbolic):
    assert_allclose(ball_volume(hyperbolic, [0.3, 0.1], 50.0), hyperbolic.total_volume, rtol=1e-6)


def test_ball_volume_rejects_nonpositive_radius(torus):
    with pytest.raises(DomainError):
        ball_volume(torus, [0.0, 0.0], 0.0)


def test_ball_volumes_vectorized(sphere):
    xs = np.array([[1.0, 0.5], [2.0, 1.5]])
    assert_allclose(ball_volumes(sphere, xs, [0.2, 0.3]),
                    [ball_volume(sphere, xs[0], 0.2), ball_volume(sphere, xs[1], 0.3)])


def test_unit_ball_volume():
    assert_allclose([unit_ball_volume(m) for m in (1, 2, 3)], [2.0, np.pi, 4 * np.pi / 3])


def test_degree_out_of_range():
    with pytest.raises(DegreeError):
        form_dimension(2, 3)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_hodge_star_squares_to_sign(m):
    for j in range(m + 1):
        square = hodge_star(m, m - j) @ hodge_star(m, j)
        assert_allclose(square, (-1) ** (j * (m - j)) * np.eye(form_dimension(m, j)))


@pytest.mark.parametrize("m,j", [(3, 0), (3, 1), (4, 1), (4, 2)])
def test_wedges_anticommute(m, j):
    first = wedge_matrices(m, j)
    second = wedge_matrices(m, j + 1)
    for a in range(m):
        for b in range(m):
            assert_allclose(second[a] @ first[b], -second[b] @ first[a])


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(-1.0, 1.0)), st.integers(0, 3))
def test_compound_of_rotation_is_exponential_of_derivation(A, j):
    skew = A - A.T
    assert_allclose(compound(expm(skew), j), expm(derivation(skew, j)), atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, (2, 3, 3), elements=st.floats(-2.0, 2.0)), st.integers(1, 2))
def test_compound_is_multiplicative(pair, j):
    left, right = pair
    assert_allclose(compound(left @ right, j), compound(left, j) @ compound(right, j), atol=1e-9)
