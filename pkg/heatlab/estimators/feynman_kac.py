"""Covariant Feynman-Kac: e^{-T Delta_j} alpha(x) = E[Q(t) //_t^{-1} alpha(X_t)], t = 2T."""

from __future__ import annotations

import numpy as np

from heatlab.geometry.exterior import compound
from heatlab.geometry.manifolds import ModelManifold
from heatlab.models import DampedTransports, DevelopedPath, FormField, MCEstimate
from heatlab.estimators.sampling import collect, path_config, summarize
from heatlab.stochastic.development import develop_path
from heatlab.stochastic.transports import damped_transports


def field_at(path: DevelopedPath, stop: np.ndarray, values_fn) -> np.ndarray:
    """values_fn(points, rows) at X_{stop[p]}; NaN rows where the path has left the chart."""
    rows = np.arange(path.n_paths)
    X = path.points[rows, stop]
    finite = np.all(np.isfinite(X), axis=-1)
    sample = values_fn(X[finite], rows[finite])
    out = np.full((path.n_paths,) + sample.shape[1:], np.nan)
    out[finite] = sample
    return out


def pull_back(path: DevelopedPath, transports: DampedTransports, stop: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Q_k C_k^T alpha(X_k) at per-path indices k = stop: components in the frame at x0."""
    rows = np.arange(path.n_paths)
    C = compound(path.frames[rows, stop], transports.degree)
    return np.einsum("pIJ,pKJ,pK->pI", transports.Q[rows, stop], C, values)


def _fk_chunk(task) -> np.ndarray:
    payload, indices = task
    M, alpha, cfg = payload["manifold"], payload["field"], payload["config"]
    path = develop_path(M, payload["x"], cfg, indices=indices)
    transports = damped_transports(M, path, alpha.degree, payload["coupling"])
    stop = np.full(path.n_paths, cfg.n_steps)
    values = field_at(path, stop, lambda X, rows: alpha.evaluate(X))
    return pull_back(path, transports, stop, values)


def _scalar_chunk(task) -> np.ndarray:
    payload, indices = task
    M, alpha, cfg = payload["manifold"], payload["field"], payload["config"]
    path = develop_path(M, payload["x"], cfg, indices=indices)
    stop = np.full(path.n_paths, cfg.n_steps)
    values = field_at(path, stop, lambda X, rows: alpha.evaluate(X))
    return np.linalg.norm(values, axis=-1, keepdims=True)


def feynman_kac(M: ModelManifold, alpha: FormField, x, T: float, n_paths: int, seed: int,
                n_steps: int | None = None, scheme: str | None = None, workers: int = 1,
                coupling: str = "implemented") -> MCEstimate:
    """Monte-Carlo estimate of e^{-T Delta_j} alpha(x), componentwise in the frame at x."""
    cfg = path_config(T, seed, n_steps, scheme)
    payload = {"manifold": M, "field": alpha, "x": np.asarray(x, dtype=float), "config": cfg, "coupling": coupling}
    samples = collect(_fk_chunk, payload, n_paths, workers)
    return summarize(samples, seed, f"feynman_kac {M.name} j={alpha.degree} T={T:g}")


def scalar_feynman_kac(M: ModelManifold, alpha: FormField, x, T: float, n_paths: int, seed: int,
                       n_steps: int | None = None, scheme: str | None = None, workers: int = 1) -> MCEstimate:
    """Monte-Carlo estimate of e^{-T Delta_0} |alpha| (x)."""
    cfg = path_config(T, seed, n_steps, scheme)
    payload = {"manifold": M, "field": alpha, "x": np.asarray(x, dtype=float), "config": cfg}
    samples = collect(_scalar_chunk, payload, n_paths, workers)
    return summarize(samples, seed, f"scalar_feynman_kac {M.name} T={T:g}")
