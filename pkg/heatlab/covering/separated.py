"""Maximal separated sets and the cardinality bound for their local counts."""

from __future__ import annotations

import numpy as np

from heatlab.covering.space import FiniteMetricMeasureSpace
from heatlab.harness.fitting import lambert_constant


def separated_set(space: FiniteMetricMeasureSpace, delta: float) -> list[int]:
    """Greedy maximal delta-separated set, inserting points in index order."""
    if not delta > 0:
        raise ValueError(f"separated_set failed ({space.name}): delta must be positive, got {delta}")
    nearest = np.full(space.n, np.inf)
    chosen: list[int] = []
    for i in range(space.n):
        if nearest[i] >= delta:
            chosen.append(i)
            nearest = np.minimum(nearest, space.distances[i])
    return chosen


def coverage_defect(space: FiniteMetricMeasureSpace, centers, delta: float) -> dict[str, float]:
    """Largest distance to the nearest center, and the worst half-ball overlap count."""
    centers = np.asarray(centers, dtype=int)
    to_centers = space.distances[:, centers]
    half = to_centers < delta / 2.0
    return {
        "covering_radius": float(to_centers.min(axis=1).max()),
        "max_half_ball_hits": int(half.sum(axis=1).max()),
        "min_separation": float(np.min(space.distances[np.ix_(centers, centers)]
                                       + np.diag(np.full(len(centers), np.inf)))) if len(centers) > 1 else np.inf,
    }


def local_counts(space: FiniteMetricMeasureSpace, centers, delta: float, alphas) -> np.ndarray:
    """max_x #{i : d(x, y_i) <= alpha delta} for each alpha."""
    to_centers = space.distances[:, np.asarray(centers, dtype=int)]
    return np.array([int((to_centers <= a * delta).sum(axis=1).max()) for a in alphas])


def card_fit(space: FiniteMetricMeasureSpace, centers, delta: float, alphas=(0.5, 1.0, 2.0, 4.0, 8.0),
             dimension: int | None = None) -> tuple[float, np.ndarray]:
    """Smallest C with count(alpha) <= C alpha^m e^{C alpha} over the grid; returns (C, counts)."""
    m = dimension or space.dimension or 1
    alphas = np.asarray(alphas, dtype=float)
    counts = local_counts(space, centers, delta, alphas)
    constant = max(lambert_constant(c / a ** m, a) for c, a in zip(counts, alphas))
    return float(constant), counts
