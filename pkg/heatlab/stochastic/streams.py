"""Per-path random streams and chunked, order-preserving dispatch.

A path's Gaussian increments depend only on (master_seed, path index), never on
the chunk it was simulated in or on the number of workers.
"""

from __future__ import annotations

from multiprocessing import Pool
from typing import Callable, Sequence

import numpy as np

from heatlab import config


def path_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=(int(index),)))


def gaussian_increments(master_seed: int, indices, n_steps: int, m: int, dt: float) -> np.ndarray:
    """(P, n_steps, m) increments with covariance dt * I, one stream per path index."""
    rows = [path_rng(master_seed, i).standard_normal((n_steps, m)) for i in np.asarray(indices)]
    return np.sqrt(dt) * np.stack(rows) if rows else np.zeros((0, n_steps, m))


def chunk_ranges(n_paths: int, chunk: int = config.CHUNK_PATHS) -> list[np.ndarray]:
    if n_paths < 1:
        raise ValueError(f"chunk_ranges failed (n_paths={n_paths}): need at least one path")
    return [np.arange(start, min(start + chunk, n_paths)) for start in range(0, n_paths, chunk)]


def parallel_map(fn: Callable, tasks: Sequence, workers: int = 1) -> list:
    """Pool.map when workers > 1; results always come back in task order."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with Pool(processes=min(workers, len(tasks))) as pool:
        return pool.map(fn, tasks)


def ordered_mean(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error over the leading (path) axis, in index order."""
    n = samples.shape[0]
    if n < 2:
        raise ValueError(f"ordered_mean failed (n={n}): need at least two samples")
    mean = np.sum(samples, axis=0) / n
    var = np.sum((samples - mean) ** 2, axis=0) / (n - 1)
    return mean, np.sqrt(var / n)
