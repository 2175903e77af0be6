import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from heatlab.errors import ConfigError, DegreeError, UnsupportedError
from heatlab.estimators.bismut import bismut_global, bismut_local, exit_probability
from heatlab.estimators.feynman_kac import feynman_kac, scalar_feynman_kac
from heatlab.estimators.fields import build_field, eigen_field, parallel_field, random_band_limited_field
from heatlab.estimators.gradient_bounds import spectral_gradient, spectral_value, sup_gradient_bound
from heatlab.estimators.sampling import summarize
from heatlab.models import MCEstimate
from heatlab.spectral import basis_for
from heatlab.spectral.sphere import sphere_basis
from heatlab.spectral.torus import torus_basis

# fixed seeds; Monte-Carlo agreement is checked inside four standard errors
BAND = 4.0
SIGMAS = 4.0


def test_parallel_form_is_reproduced_exactly(torus_forms):
    alpha = parallel_field(torus_forms[1])
    x = np.array([1.0, 2.0])
    est = feynman_kac(torus_forms[1].manifold, alpha, x, 0.5, n_paths=200, seed=1, n_steps=10)
    assert_allclose(est.value, alpha.evaluate(x)[0], rtol=1e-12)
    assert np.all(est.std_error < 1e-12)
    assert est.rejected == 0


@pytest.mark.parametrize("j", [0, 1])
def test_torus_feynman_kac_matches_spectral_value(j, rng):
    basis = torus_basis(2, band_limit=3, degree=j)
    alpha = random_band_limited_field(basis, rng, band=BAND)
    x, T = np.array([0.7, 4.0]), 0.3
    est = feynman_kac(basis.manifold, alpha, x, T, n_paths=4000, seed=21, n_steps=10)
    assert np.all(est.z_scores(spectral_value(alpha, x, T)) < SIGMAS)


def test_sphere_feynman_kac_matches_spectral_value(sphere):
    basis = sphere_basis(band_limit=2)
    alpha = eigen_field(basis, 2)
    x, T = sphere.default_point(), 0.25
    est = feynman_kac(sphere, alpha, x, T, n_paths=3000, seed=5, n_steps=40)
    assert np.all(est.z_scores(spectral_value(alpha, x, T)) < SIGMAS)


def test_scalar_feynman_kac_dominates_form_norm(torus_forms, rng):
    alpha = random_band_limited_field(torus_forms[1], rng, band=BAND)
    x, T = np.array([2.0, 2.0]), 0.2
    est = scalar_feynman_kac(torus_forms[1].manifold, alpha, x, T, n_paths=3000, seed=8, n_steps=10)
    assert est.value.shape == (1,)
    assert np.linalg.norm(spectral_value(alpha, x, T)) <= est.value[0] + SIGMAS * est.std_error[0]


def test_worker_count_does_not_change_estimates(torus_forms, rng):
    alpha = random_band_limited_field(torus_forms[0], rng, band=BAND)
    args = (torus_forms[0].manifold, alpha, np.array([1.0, 1.0]), 0.2)
    one = feynman_kac(*args, n_paths=2500, seed=3, n_steps=5, workers=1)
    two = feynman_kac(*args, n_paths=2500, seed=3, n_steps=5, workers=2)
    assert_array_equal(one.value, two.value)
    assert_array_equal(one.std_error, two.std_error)


def test_torus_bismut_global_matches_gradient(rng):
    basis = torus_basis(2, band_limit=3, degree=0)
    alpha = random_band_limited_field(basis, rng, band=BAND)
    x, T, xi = np.array([3.0, 0.5]), 0.25, np.array([0.6, 0.8])
    est = bismut_global(basis.manifold, alpha, x, T, xi, n_paths=4000, seed=13, n_steps=10)
    reference = np.sum(spectral_gradient(alpha, x, T) * xi.reshape(2, 1))
    assert np.all(est.z_scores(reference) < SIGMAS)


def test_bismut_local_with_large_radius_agrees_with_global(rng):
    basis = torus_basis(2, band_limit=3, degree=0)
    alpha = random_band_limited_field(basis, rng, band=BAND)
    x, T, xi = np.array([3.0, 0.5]), 0.25, np.array([1.0, 0.0])
    glob = bismut_global(basis.manifold, alpha, x, T, xi, n_paths=500, seed=2, n_steps=10)
    local = bismut_local(basis.manifold, alpha, x, T, 100.0, xi, n_paths=500, seed=2, n_steps=10)
    assert_allclose(local.value, glob.value, rtol=1e-10, atol=1e-12)


def test_bismut_rejects_unsupported_settings(hyperbolic, torus_forms):
    frame = basis_for(hyperbolic, 0)
    alpha = frame.field(np.ones(frame.size))
    with pytest.raises(UnsupportedError):
        bismut_global(hyperbolic, alpha, [0.0, 0.0], 0.1, [1.0, 0.0], n_paths=10, seed=0)
    with pytest.raises(UnsupportedError):
        bismut_local(hyperbolic, alpha, [0.0, 0.0], 0.1, 0.5, [1.0, 0.0], n_paths=10, seed=0)
    torus_alpha = parallel_field(torus_forms[0])
    with pytest.raises(ValueError):
        bismut_global(torus_forms[0].manifold, torus_alpha, [0.0, 0.0], 0.1, [1.0, 0.0, 0.0], n_paths=10, seed=0)
    with pytest.raises(ValueError):
        bismut_local(torus_forms[0].manifold, torus_alpha, [0.0, 0.0], 0.1, 0.0, [1.0, 0.0], n_paths=10, seed=0)


def test_exit_probability_extremes(torus):
    assert exit_probability(torus, [0.0, 0.0], 0.1, 100.0, n_paths=50, seed=0, n_steps=10) == 0.0
    assert exit_probability(torus, [0.0, 0.0], 0.1, 1e-9, n_paths=50, seed=0, n_steps=10) == 1.0


def test_patch_rejections_are_counted():
    samples = np.vstack([np.ones((98, 1)), np.full((2, 1), np.nan)])
    est = summarize(samples, seed=4, tag="unit")
    assert est.rejected == 2
    assert est.flagged
    assert_allclose(est.value, [1.0])


def test_z_scores_handle_zero_error():
    est = MCEstimate(value=np.array([1.0, 2.0]), std_error=np.zeros(2), n_paths=10, seed=0)
    assert_array_equal(est.z_scores([1.0, 2.0]), [0.0, 0.0])
    assert np.isinf(est.z_scores([1.0, 2.5])[1])
    record = est.to_record()
    assert record["value"] == [1.0, 2.0] and record["n_paths"] == 10


def test_sup_gradient_bound_table(torus_forms, rng):
    fields = [random_band_limited_field(torus_forms[1], rng) for _ in range(3)]
    points = np.array([[0.0, 0.0], [1.0, 2.0]])
    table = sup_gradient_bound(torus_forms[1].manifold, 1, [0.1, 1.0], points, fields)
    assert table.shape == (2, 3, 2)
    assert np.all(np.isfinite(table)) and np.all(table >= 0)
    grads = fields[0].evolve(0.1).gradient(points[1:])
    assert_allclose(table[0, 0, 1], np.linalg.norm(grads) / fields[0].sup_norm())
    with pytest.raises(DegreeError):
        sup_gradient_bound(torus_forms[1].manifold, 0, [0.1], points, fields)


def test_build_field_kinds(torus_forms, rng):
    basis = torus_forms[1]
    assert build_field({"kind": "parallel"}, basis, rng).label == "parallel"
    eigen = build_field({"kind": "eigen", "above": 0.0}, basis, rng)
    assert basis.eigenvalues[eigen.active[0]] > 0
    coefficients = build_field({"kind": "coefficients", "values": {"3": 2.0}}, basis, rng)
    assert_array_equal(coefficients.active, [3])
    with pytest.raises(ConfigError):
        build_field({"kind": "bump"}, basis, rng)
    with pytest.raises(ConfigError):
        build_field({"kind": "spline"}, basis, rng)
