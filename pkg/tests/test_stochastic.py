import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from heatlab import config
from heatlab.models import PathConfig
from heatlab.stochastic.controls import (control_exit_adapted, control_linear, exit_profile, lagged_exit_profile,
                                       moment_of_control)
from heatlab.stochastic.development import develop_path, dump_path, frame_defect, path_horizon
from heatlab.stochastic.integrals import bismut_integrals
from heatlab.stochastic.streams import chunk_ranges, gaussian_increments, ordered_mean, parallel_map
from heatlab.stochastic.transports import damped_transports, gronwall_ratio


def test_increments_depend_only_on_path_index():
    full = gaussian_increments(7, np.arange(6), 10, 2, 0.01)
    part = gaussian_increments(7, [3, 5], 10, 2, 0.01)
    assert_array_equal(part, full[[3, 5]])
    assert not np.array_equal(gaussian_increments(8, [3], 10, 2, 0.01)[0], full[3])


def test_chunks_cover_every_path_once():
    chunks = chunk_ranges(5000, 2048)
    assert [len(c) for c in chunks] == [2048, 2048, 904]
    assert_array_equal(np.concatenate(chunks), np.arange(5000))
    with pytest.raises(ValueError):
        chunk_ranges(0)


def test_parallel_map_keeps_task_order():
    tasks = [-3, 1, -2, 4, -5]
    assert parallel_map(abs, tasks, workers=2) == [3, 1, 2, 4, 5]
    assert parallel_map(abs, tasks, workers=1) == [3, 1, 2, 4, 5]


def test_ordered_mean():
    mean, err = ordered_mean(np.array([[1.0], [3.0]]))
    assert_allclose(mean, [2.0])
    assert_allclose(err, [1.0])
    with pytest.raises(ValueError):
        ordered_mean(np.ones((1, 1)))


def test_path_horizon_doubles_semigroup_time():
    assert path_horizon(0.5) == 1.0
    with pytest.raises(ValueError):
        path_horizon(0.0)


def test_path_config_validation():
    cfg = PathConfig(horizon=1.0, n_steps=4, master_seed=0)
    assert_allclose(cfg.times, [0.0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        PathConfig(horizon=1.0, n_steps=0, master_seed=0)
    with pytest.raises(ValueError):
        PathConfig(horizon=1.0, n_steps=4, master_seed=0, scheme="milstein")


def test_torus_development_is_a_wrapped_walk(torus):
    cfg = PathConfig(horizon=0.5, n_steps=20, master_seed=11)
    x0 = np.array([6.0, 0.1])
    path = develop_path(torus, x0, cfg, n_paths=5)
    walk = x0 + np.concatenate([np.zeros((5, 1, 2)), np.cumsum(path.increments, axis=1)], axis=1)
    assert_allclose(path.points, torus.wrap(walk))
    assert frame_defect(path) == 0.0
    assert np.all(path.boundary_index == -1)


@pytest.mark.parametrize("scheme", ["geodesic_step", "euler_heun"])
def test_sphere_frames_stay_orthonormal(sphere, scheme):
    cfg = PathConfig(horizon=1.0, n_steps=50, master_seed=2, scheme=scheme)
    path = develop_path(sphere, sphere.default_point(), cfg, n_paths=20)
    assert np.all(np.isfinite(path.points))
    assert frame_defect(path) < config.ORTHO_TOL
    assert_allclose(path.radial[:, 0], 0.0, atol=1e-12)


def test_sub_batches_reproduce_full_batch(sphere):
    cfg = PathConfig(horizon=0.4, n_steps=10, master_seed=5)
    full = develop_path(sphere, sphere.default_point(), cfg, n_paths=7)
    part = develop_path(sphere, sphere.default_point(), cfg, indices=[4, 5, 6])
    assert_allclose(part.points, full.points[4:], rtol=1e-12, atol=1e-14)


def test_patch_paths_are_truncated_at_the_chart_edge(hyperbolic):
    cfg = PathConfig(horizon=8.0, n_steps=200, master_seed=1)
    path = develop_path(hyperbolic, [0.0, 0.0], cfg, n_paths=50)
    left = path.boundary_index >= 0
    assert left.any()
    for p in np.flatnonzero(left):
        k = path.boundary_index[p]
        assert np.all(np.isnan(path.points[p, k:]))
        assert np.all(np.isinf(path.radial[p, k:]))


def test_dump_path_columns(tmp_path, torus):
    cfg = PathConfig(horizon=0.1, n_steps=3, master_seed=0)
    path = develop_path(torus, [0.0, 0.0], cfg, n_paths=2)
    table = np.loadtxt(dump_path(path, 1, tmp_path / "path.dat"))
    assert table.shape == (4, 1 + 2 + 4 + 2)
    assert_allclose(table[:, 0], cfg.times)
    assert_allclose(table[:3, -2:], path.increments[1])


def test_linear_control():
    control = control_linear(1.0, [2.0, 0.0], 4)
    assert_allclose(control.values[0, :, 0, 0], [2.0, 1.5, 1.0, 0.5, 0.0])
    assert_allclose(control.derivatives[0, :, 0, 0], -2.0)
    assert_allclose(moment_of_control(control, 0.25), [1.0])
    with pytest.raises(ValueError):
        control_linear(0.0, [1.0, 0.0], 4)


def test_exit_control_is_linear_before_leaving_half_ball(torus):
    cfg = PathConfig(horizon=1e-4, n_steps=8, master_seed=3)
    path = develop_path(torus, [1.0, 1.0], cfg, n_paths=4)
    profile = exit_profile(path, cfg.horizon, 10.0)
    assert_allclose(profile, np.broadcast_to(1.0 - cfg.times / cfg.horizon, profile.shape))
    control = control_exit_adapted(path, cfg.horizon, 10.0, [1.0, 0.0])
    assert_array_equal(control.stop_index, [8, 8, 8, 8])


def test_exit_control_vanishes_from_exit_index(torus):
    cfg = PathConfig(horizon=1.0, n_steps=8, master_seed=3)
    path = develop_path(torus, [1.0, 1.0], cfg, n_paths=4)
    exits = path.exit_index(1e-9)
    assert_array_equal(exits, [1, 1, 1, 1])
    control = control_exit_adapted(path, cfg.horizon, 1e-9, [1.0, 0.0])
    for p, k in enumerate(exits):
        assert np.all(control.values[p, k:] == 0.0)
    assert_array_equal(control.stop_index, [2, 2, 2, 2])
    # lagged rates integrate to -xi over the kept steps and vanish after them
    rates = control.derivatives[:, :, 0, 0]
    assert_allclose(rates[:, :2].sum(axis=1) * cfg.dt, -1.0)
    assert_allclose(rates[:, 2:], 0.0)
    assert_allclose(lagged_exit_profile(path, cfg.horizon, 1e-9)[:, 1], 0.875)
    with pytest.raises(ValueError):
        exit_profile(path, 1.0, 0.0)


def test_sphere_one_form_transport_is_scalar_decay(sphere):
    cfg = PathConfig(horizon=1.0, n_steps=20, master_seed=4)
    path = develop_path(sphere, sphere.default_point(), cfg, n_paths=3)
    transports = damped_transports(sphere, path, 1)
    expected = np.exp(-0.5 * cfg.times)[None, :, None, None] * np.eye(2)
    assert_allclose(transports.Q, np.broadcast_to(expected, transports.Q.shape), rtol=1e-10, atol=1e-12)
    assert gronwall_ratio(transports) <= 1.0 + 1e-9


def test_flat_bismut_integral_is_scaled_endpoint(torus):
    cfg = PathConfig(horizon=0.5, n_steps=10, master_seed=9)
    path = develop_path(torus, [0.0, 0.0], cfg, n_paths=6)
    transports = damped_transports(torus, path, 0)
    xi = np.array([1.0, -2.0])
    stochastic, drift = bismut_integrals(path, transports, control_linear(cfg.horizon, xi, cfg.n_steps), 0)
    expected = -(path.increments.sum(axis=1) @ xi) / cfg.horizon
    assert_allclose(stochastic[:, 0], expected, rtol=1e-12, atol=1e-14)
    assert_allclose(drift, 0.0)
