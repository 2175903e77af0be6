"""Chunked, seed-deterministic sample collection shared by the estimators."""

from __future__ import annotations

from typing import Callable

import numpy as np

from heatlab import config
from heatlab.models import MCEstimate, PathConfig
from heatlab.stochastic.development import path_horizon
from heatlab.stochastic.streams import chunk_ranges, ordered_mean, parallel_map


def path_config(T: float, seed: int, n_steps: int | None = None, scheme: str | None = None) -> PathConfig:
    return PathConfig(
        horizon=path_horizon(T),
        n_steps=n_steps or config.DEFAULT_N_STEPS,
        master_seed=int(seed),
        scheme=scheme or config.DEFAULT_SCHEME,
    )


def collect(worker: Callable, payload: dict, n_paths: int, workers: int = 1) -> np.ndarray:
    """Samples for paths 0..n_paths-1 in index order, independent of the worker count."""
    tasks = [(payload, indices) for indices in chunk_ranges(n_paths)]
    return np.concatenate(parallel_map(worker, tasks, workers), axis=0)


def summarize(samples: np.ndarray, seed: int, tag: str) -> MCEstimate:
    """Mean over finite rows; rows with non-finite entries count as rejected paths."""
    n = samples.shape[0]
    finite = np.all(np.isfinite(samples.reshape(n, -1)), axis=1)
    rejected = int(n - finite.sum())
    mean, std_error = ordered_mean(samples[finite])
    flagged = rejected / n > config.REJECTION_FLAG_RATE
    if flagged:
        print(f"[mc] {tag}: {rejected}/{n} paths rejected after leaving the chart")
    return MCEstimate(value=mean, std_error=std_error, n_paths=n, seed=int(seed),
                      rejected=rejected, flagged=flagged)
