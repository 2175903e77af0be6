"""Global and local covariant Bismut estimators of (nabla e^{-T Delta_j} alpha (x), xi)."""

from __future__ import annotations

import numpy as np

from heatlab.errors import UnsupportedError
from heatlab.estimators.feynman_kac import field_at, pull_back
from heatlab.estimators.sampling import collect, path_config, summarize
from heatlab.geometry.manifolds import ModelManifold
from heatlab.models import FormField, MCEstimate
from heatlab.stochastic.controls import control_exit_adapted, control_linear
from heatlab.stochastic.development import develop_path
from heatlab.stochastic.integrals import bismut_integrals
from heatlab.stochastic.transports import damped_transports


def _xi(alpha: FormField, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    m, N = alpha.basis.dimension, alpha.basis.components
    if xi.size != m * N:
        raise ValueError(f"bismut failed ({alpha.basis.tag}): xi needs {m}x{N} entries, got shape {xi.shape}")
    return xi.reshape(m, N)


def _global_chunk(task) -> np.ndarray:
    payload, indices = task
    M, alpha, cfg = payload["manifold"], payload["field"], payload["config"]
    j = alpha.degree
    path = develop_path(M, payload["x"], cfg, indices=indices)
    transports = damped_transports(M, path, j, payload["coupling"])
    control = control_linear(cfg.horizon, payload["xi"], cfg.n_steps)
    stochastic, drift = bismut_integrals(path, transports, control, j)
    stop = np.full(path.n_paths, cfg.n_steps)
    values = pull_back(path, transports, stop, field_at(path, stop, lambda X, rows: alpha.evaluate(X)))
    return -np.sum(values * (stochastic + drift), axis=-1)


def _local_chunk(task) -> np.ndarray:
    payload, indices = task
    M, alpha, cfg, r = payload["manifold"], payload["field"], payload["config"], payload["radius"]
    j = alpha.degree
    path = develop_path(M, payload["x"], cfg, indices=indices)
    transports = damped_transports(M, path, j, payload["coupling"])
    control = control_exit_adapted(path, cfg.horizon, r, payload["xi"])
    stochastic, drift = bismut_integrals(path, transports, control, j)
    stop = control.stop_index
    remaining = 0.5 * (cfg.horizon - path.times[stop])

    def evolved(X, rows):
        return alpha.evaluate_evolved(X, remaining[rows])

    values = pull_back(path, transports, stop, field_at(path, stop, evolved))
    return -np.sum(values * (stochastic + drift), axis=-1)


def bismut_global(M: ModelManifold, alpha: FormField, x, T: float, xi, n_paths: int, seed: int,
                  n_steps: int | None = None, scheme: str | None = None, workers: int = 1,
                  coupling: str = "implemented") -> MCEstimate:
    """Linear control l_s = (1 - s/t) xi over the full horizon t = 2T."""
    if M.kind == "hyperbolic_patch":
        raise UnsupportedError(
            f"bismut_global failed ({M.name}): the patch is not complete; use bismut_local"
        )
    cfg = path_config(T, seed, n_steps, scheme)
    payload = {"manifold": M, "field": alpha, "x": np.asarray(x, dtype=float), "config": cfg,
               "xi": _xi(alpha, xi), "coupling": coupling}
    samples = collect(_global_chunk, payload, n_paths, workers)
    return summarize(samples[:, None], seed, f"bismut_global {M.name} j={alpha.degree} T={T:g}")


def bismut_local(M: ModelManifold, alpha: FormField, x, T: float, r: float, xi, n_paths: int, seed: int,
                 n_steps: int | None = None, scheme: str | None = None, workers: int = 1,
                 coupling: str = "implemented") -> MCEstimate:
    """Exit-adapted control on B(x, r); the inner semigroup at the stopped point comes from the oracle."""
    if not getattr(alpha.basis, "spectral", False):
        raise UnsupportedError(
            f"bismut_local failed ({M.name}): no spectral oracle for the inner semigroup on this manifold"
        )
    if not r > 0:
        raise ValueError(f"bismut_local failed ({M.name}): radius must be positive, got {r}")
    cfg = path_config(T, seed, n_steps, scheme)
    payload = {"manifold": M, "field": alpha, "x": np.asarray(x, dtype=float), "config": cfg,
               "xi": _xi(alpha, xi), "radius": float(r), "coupling": coupling}
    samples = collect(_local_chunk, payload, n_paths, workers)
    return summarize(samples[:, None], seed, f"bismut_local {M.name} j={alpha.degree} T={T:g} r={r:g}")


def exit_probability(M: ModelManifold, x, T: float, r: float, n_paths: int, seed: int,
                     n_steps: int | None = None, scheme: str | None = None) -> float:
    """Fraction of paths with dist(X_s, x) >= r for some grid time s <= 2T."""
    cfg = path_config(T, seed, n_steps, scheme)
    path = develop_path(M, x, cfg, n_paths=n_paths)
    return float(np.mean(path.exit_index(r) >= 0))
