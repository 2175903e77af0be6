import numpy as np
import pytest
from numpy.testing import assert_allclose

from heatlab.errors import DomainError, MeshError, TruncationError, UnsupportedError
from heatlab.harness.oracles import scalar_kernel
from heatlab.spectral import basis_for
from heatlab.spectral.basis import FrameBasis, apply_multiplier, commutation_defect, gram_matrix
from heatlab.spectral.dec import (betti_numbers, dec_laplacian, dec_spectrum, harmonic_dimensions,
                                  icosphere, incidence_defect, torus_mesh)
from heatlab.spectral.kernels import heat_kernel, heat_trace, kernel_table, minimum_time, tail_bound
from heatlab.spectral.mesh_io import parse_mesh, read_mesh, write_mesh
from heatlab.spectral.quadrature import quadrature
from heatlab.spectral.riesz import level_set_measure, lp_norm, riesz_apply
from heatlab.spectral.sphere import SphereBasis, sphere_basis
from heatlab.spectral.torus import torus_basis, torus_image_kernel


@pytest.mark.parametrize("j", [0, 1, 2])
def test_torus_basis_is_orthonormal(torus_forms, j):
    basis = torus_forms[j]
    assert_allclose(gram_matrix(basis), np.eye(basis.size), atol=1e-10)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_sphere_basis_is_orthonormal(sphere_forms, j):
    basis = sphere_forms[j]
    assert_allclose(gram_matrix(basis), np.eye(basis.size), atol=1e-10)


def test_eigenvalues_are_sorted(torus_forms, sphere_forms):
    for basis in torus_forms + sphere_forms:
        assert np.all(np.diff(basis.eigenvalues) >= 0)


def test_sphere_one_forms_have_no_zero_modes(sphere_forms):
    assert len(sphere_forms[1].zero_modes()) == 0
    assert len(sphere_forms[0].zero_modes()) == 1


def test_torus_parallel_forms(torus_forms):
    assert [len(b.zero_modes()) for b in torus_forms] == [1, 2, 1]


@pytest.mark.parametrize("j", [0, 1])
def test_exterior_derivative_commutes_with_semigroup(torus_forms, sphere_forms, j):
    assert commutation_defect(torus_forms[j], torus_forms[j + 1], t=0.3) < 1e-10
    assert commutation_defect(sphere_forms[j], sphere_forms[j + 1], t=0.3) < 1e-10


def test_sphere_basis_rejects_bad_input(torus):
    with pytest.raises(DomainError):
        SphereBasis(torus, 4, 0)
    with pytest.raises(ValueError):
        sphere_basis(band_limit=0)


def test_basis_for_patch_has_no_spectrum(hyperbolic):
    basis = basis_for(hyperbolic, 1)
    assert isinstance(basis, FrameBasis)
    with pytest.raises(UnsupportedError):
        basis.field(np.ones(basis.size)).evolve(0.1)
    with pytest.raises(UnsupportedError):
        apply_multiplier(basis, np.exp, np.ones(basis.size))


def test_torus_kernel_matches_image_sum(torus):
    basis = torus_basis(2, band_limit=8)
    x, y = np.array([0.4, 1.3]), np.array([2.5, 5.0])
    for t in (0.3, 1.0):
        assert_allclose(heat_kernel(basis, t, x, y)[0, 0], torus_image_kernel(torus, t, x, y), rtol=1e-9)
    assert_allclose(heat_trace(basis, 0.5), torus.total_volume * torus_image_kernel(torus, 0.5, x, x), rtol=1e-9)


def test_truncation_error_reports_minimum_time():
    basis = torus_basis(2, band_limit=2)
    with pytest.raises(TruncationError) as info:
        heat_kernel(basis, 1e-3, [0.0, 0.0], [0.1, 0.1])
    assert info.value.min_time > 1e-3
    assert tail_bound(basis, info.value.min_time) <= 1.01e-10


def test_tail_bound_decreases_with_band():
    times = [minimum_time(torus_basis(2, band_limit=L)) for L in (2, 4, 8)]
    assert times[0] > times[1] > times[2]


def test_kernel_table_is_symmetric(sphere):
    basis = sphere_basis(band_limit=40, degree=1)
    points = np.array([[1.0, 0.2], [2.0, 3.0], [0.7, 5.5]])
    table = kernel_table(basis, [0.2, 0.5], points, points)
    assert table.symmetry_defect() < 1e-12
    assert np.all(table.tails <= 1e-10)


@pytest.mark.parametrize("name", ["torus", "sphere"])
def test_scalar_kernel_integrates_to_one(request, name):
    M = request.getfixturevalue(name)
    points, weights = quadrature(M, 48)
    x = M.default_point() + 0.1
    assert_allclose(np.sum(weights * scalar_kernel(M, 0.1, x, points)), 1.0, rtol=1e-8)


def test_scalar_kernel_is_symmetric(sphere):
    x, y = np.array([0.5, 1.0]), np.array([2.2, 4.0])
    assert_allclose(scalar_kernel(sphere, 0.2, x, y), scalar_kernel(sphere, 0.2, y, x), rtol=1e-12)


def test_quadrature_weights_sum_to_volume(catalog):
    _, weights = quadrature(catalog, 48)
    assert_allclose(weights.sum(), catalog.total_volume, rtol=1e-9)


def test_riesz_norm_follows_parseval(torus_forms, rng):
    basis = torus_forms[0]
    c = rng.standard_normal(basis.size)
    kappa = 0.5
    out = riesz_apply(basis, 0, kappa, "d", c)
    expected = np.sqrt(np.sum(c ** 2 * basis.eigenvalues / (basis.eigenvalues + kappa)))
    assert_allclose(lp_norm(out, 2.0), expected, rtol=1e-10)


def test_riesz_rejects_bad_arguments(torus_forms):
    basis = torus_forms[1]
    f = np.ones(basis.size)
    with pytest.raises(ValueError):
        riesz_apply(basis, 1, 1.0, "curl", f)
    with pytest.raises(ValueError):
        riesz_apply(basis, 0, 1.0, "d", f)
    with pytest.raises(ValueError):
        riesz_apply(basis, 1, 0.0, "d", f)


def test_multiplier_must_be_finite_on_spectrum(torus_forms):
    basis = torus_forms[0]
    with np.errstate(divide="ignore"):
        with pytest.raises(ValueError):
            apply_multiplier(basis, lambda lam: 1.0 / lam, np.ones(basis.size))


def test_level_set_of_constant_field(torus_forms, torus):
    basis = torus_forms[0]
    coefficients = np.zeros(basis.size)
    coefficients[0] = 1.0
    field = basis.field(coefficients)
    height = 1.0 / np.sqrt(torus.total_volume)
    assert_allclose(level_set_measure(field, 0.5 * height), torus.total_volume)
    assert level_set_measure(field, 2.0 * height) == 0.0


def test_icosphere_complex():
    mesh = icosphere(1)
    assert mesh.counts == (42, 120, 80)
    assert incidence_defect(mesh) == 0.0
    assert betti_numbers(mesh) == (1, 0, 1)
    assert harmonic_dimensions(mesh) == (1, 0, 1)


def test_torus_mesh_harmonic_forms():
    mesh = torus_mesh()
    assert betti_numbers(mesh) == (1, 2, 1)
    assert harmonic_dimensions(mesh) == (1, 2, 1)


def test_dec_laplacian_is_positive_semidefinite():
    mesh = icosphere(1)
    for j in range(3):
        values = np.linalg.eigvalsh(dec_laplacian(mesh, j).dense())
        assert values.min() > -1e-9 * values.max()
    with pytest.raises(ValueError):
        dec_laplacian(mesh, 3)


def test_dec_spectrum_approximates_sphere():
    values = dec_spectrum(icosphere(3), 0, k=4)
    assert abs(values[0]) < 1e-8
    assert_allclose(values[1:], 2.0, rtol=0.03)


def test_mesh_file_reorients_faces(tmp_path):
    mesh = icosphere(1)
    path = write_mesh(mesh, tmp_path / "ico.mesh")
    lines = path.read_text().splitlines()
    first_face = next(i for i, line in enumerate(lines) if line.startswith("f "))
    _, a, b, c = lines[first_face].split()
    lines[first_face] = f"f {a} {c} {b}"
    path.write_text("\n".join(lines) + "\n")
    again = read_mesh(path)
    assert again.counts == mesh.counts
    assert betti_numbers(again) == (1, 0, 1)


def test_mesh_parser_rejects_garbage():
    with pytest.raises(MeshError):
        parse_mesh("v 0 0\nf 1 2 3\n")
    with pytest.raises(MeshError):
        parse_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n")


def test_open_mesh_is_rejected(tmp_path):
    path = tmp_path / "triangle.mesh"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    with pytest.raises(MeshError):
        read_mesh(path)
