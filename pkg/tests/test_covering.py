import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from heatlab.covering import (FiniteMetricMeasureSpace, calibrate_precondition, card_fit, check_properties,
                              cz_decompose, exp_sum_check, gaussian_sum_check, maximal_function,
                              maximal_function_exhaustive, random_instance, read_instance, reconstruct,
                              separated_set, write_instance)
from heatlab.covering.separated import coverage_defect, local_counts
from heatlab.covering.space import graph_instance, random_section, torus_cloud_instance
from heatlab.covering.sums import dyadic_shells
from heatlab.errors import InstanceError, PreconditionError


def line_instance(n: int = 200, spacing: float = 0.1) -> FiniteMetricMeasureSpace:
    """Evenly spaced points on a segment much longer than the maximal-function cap."""
    x = spacing * np.arange(n)
    return FiniteMetricMeasureSpace(np.abs(x[:, None] - x[None, :]), np.ones(n), dimension=1, name="line")


@pytest.mark.parametrize(
    "D,w",
    [
        (np.array([[0.0, 1.0], [1.0, 0.0]]), np.ones(3)),
        (np.array([[0.0, -1.0], [-1.0, 0.0]]), np.ones(2)),
        (np.array([[1.0, 1.0], [1.0, 0.0]]), np.ones(2)),
        (np.array([[0.0, 1.0], [2.0, 0.0]]), np.ones(2)),
        (np.zeros((2, 2)), np.ones(2)),
        (np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([1.0, 0.0])),
        (np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]]), np.ones(3)),
    ],
    ids=["shape", "negative", "diagonal", "asymmetric", "coincident", "weight", "triangle"],
)
def test_invalid_instances_are_rejected(D, w):
    with pytest.raises(InstanceError):
        FiniteMetricMeasureSpace(D, w)


def test_random_instances(rng):
    cloud = torus_cloud_instance(30, rng)
    assert_allclose(cloud.weights.sum(), 16.0)
    assert cloud.diameter <= np.sqrt(8.0) + 1e-12
    assert graph_instance(25, rng).n == 25
    with pytest.raises(InstanceError):
        random_instance("hypercube", 10, rng)


def test_instance_file_round_trip(tmp_path, rng):
    space = graph_instance(12, rng)
    u = random_section(space, rng)
    loaded, loaded_u = read_instance(write_instance(space, u, tmp_path / "g12.txt"))
    assert_array_equal(loaded.distances, space.distances)
    assert_array_equal(loaded_u, u)
    assert loaded.name == "g12"


def test_truncated_instance_file(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3\n0 1 1\n1 0 1\n")
    with pytest.raises(InstanceError):
        read_instance(path)


@pytest.mark.parametrize("cap", [0.5, 1.0, 8.0])
def test_maximal_function_matches_exhaustive_search(rng, cap):
    space = torus_cloud_instance(40, rng)
    u = random_section(space, rng)
    assert_allclose(maximal_function(space, u, cap), maximal_function_exhaustive(space, u, cap), rtol=1e-12)


def test_maximal_function_dominates_section(rng):
    space = graph_instance(40, rng)
    u = random_section(space, rng)
    assert np.all(maximal_function(space, u) >= np.abs(u) - 1e-12)


def test_maximal_function_of_spike_on_line():
    space = line_instance()
    u = np.zeros(space.n)
    u[0] = 10.0
    Mu = maximal_function(space, u)
    assert Mu[0] == 10.0
    assert_allclose(Mu[1], 5.0)
    # no ball of radius <= 8 reaches both ends
    assert np.all(Mu[170:] == 0.0)


@pytest.mark.parametrize("partition", ["shared", "first"])
def test_cz_exact_properties_on_line(partition):
    space = line_instance()
    u = np.zeros(space.n)
    u[:11] = np.linspace(1.0, 0.1, 11)
    u[3] = 10.0
    result = cz_decompose(space, u, lam=2.0, partition=partition)
    assert result.advisory is None
    assert len(result.balls) > 0
    assert all(check_properties(space, u, result).values())
    assert_array_equal(reconstruct(result), u)
    assert result.good_constant <= 1.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_cz_exact_properties_on_graphs(seed):
    rng = np.random.default_rng(seed)
    space = graph_instance(100, rng, edge_scale=2.0, chords=0)
    u = random_section(space, rng)
    result = cz_decompose(space, u, lam=0.5 * np.abs(u).max())
    assert all(check_properties(space, u, result).values())


def test_cz_trivial_below_precondition():
    space = line_instance()
    u = np.zeros(space.n)
    u[:11] = 1.0
    result = cz_decompose(space, u, lam=0.5)
    assert result.advisory is not None
    assert_array_equal(result.good, u)
    assert result.balls == []


def test_cz_rejects_bad_input():
    space = line_instance()
    u = np.zeros(space.n)
    u[0] = 1.0
    with pytest.raises(PreconditionError):
        cz_decompose(space, u, lam=1.0, host_radius=2.0)
    with pytest.raises(ValueError):
        cz_decompose(space, u, lam=1.0, partition="greedy")
    with pytest.raises(ValueError):
        cz_decompose(space, u, lam=0.0)
    far = np.zeros(space.n)
    far[50] = 1.0
    with pytest.raises(PreconditionError):
        cz_decompose(space, far, lam=1.0)


def test_calibrated_precondition_is_finite():
    space = line_instance()
    u = np.zeros(space.n)
    u[:5] = 1.0
    value = calibrate_precondition([(space, u, 0)])
    assert np.isfinite(value) and value > 0


@pytest.mark.parametrize("delta", [0.3, 0.8, 1.5])
def test_separated_set_is_maximal(rng, delta):
    space = torus_cloud_instance(80, rng)
    centers = separated_set(space, delta)
    defect = coverage_defect(space, centers, delta)
    assert defect["min_separation"] >= delta
    assert defect["covering_radius"] < delta
    assert defect["max_half_ball_hits"] <= 1
    with pytest.raises(ValueError):
        separated_set(space, 0.0)


def test_local_counts_and_card_fit(rng):
    space = torus_cloud_instance(80, rng)
    centers = separated_set(space, 0.5)
    alphas = (0.5, 1.0, 2.0, 4.0)
    counts = local_counts(space, centers, 0.5, alphas)
    assert np.all(np.diff(counts) >= 0)
    C, fitted = card_fit(space, centers, 0.5, alphas)
    assert_array_equal(fitted, counts)
    assert np.all(counts <= C * np.asarray(alphas) ** 2 * np.exp(C * np.asarray(alphas)) * (1 + 1e-9))


def test_dyadic_shells():
    assert_array_equal(dyadic_shells([0.0, 1.0, 1.5, 4.0], 1.0), [0, 0, 1, 2])


def test_gaussian_sum_check(rng):
    space = torus_cloud_instance(60, rng)
    centers = separated_set(space, 0.5)
    x = 0
    z = int(np.argmax(space.distances[0]))
    result = gaussian_sum_check(space, centers, x, z, t=0.25, C_bound=16.0)
    assert result["passed"]
    assert result["lhs"] <= result["rhs"]
    assert result["measured_constant"] <= 16.0
    assert_allclose(result["shell_totals"].sum(), result["lhs"])
    with pytest.raises(PreconditionError):
        gaussian_sum_check(space, centers, x, x, t=0.25, C_bound=16.0)


def test_gaussian_sum_check_fails_below_measured_constant(rng):
    space = torus_cloud_instance(60, rng)
    centers = separated_set(space, 0.5)
    z = int(np.argmax(space.distances[0]))
    measured = gaussian_sum_check(space, centers, 0, z, t=0.25, C_bound=16.0)["measured_constant"]
    result = gaussian_sum_check(space, centers, 0, z, t=0.25, C_bound=0.5 * measured)
    assert not result["passed"]
    assert result["ratio"] > 1.0


def test_exponential_sum_bound_holds():
    result = exp_sum_check(np.geomspace(1e-2, 10.0, 40))
    assert result["passed"]
    assert result["max_ratio"] <= 1.0
    with pytest.raises(ValueError):
        exp_sum_check([0.0, 1.0])
