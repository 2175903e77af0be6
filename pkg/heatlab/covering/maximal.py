"""Capped uncentered maximal function on a finite metric measure space."""

from __future__ import annotations

import numpy as np

from heatlab import config
from heatlab.covering.space import FiniteMetricMeasureSpace, magnitude


def maximal_function(space: FiniteMetricMeasureSpace, u, cap: float = config.MAXIMAL_RADIUS_CAP) -> np.ndarray:
    """sup of mu-averages of |u| over closed balls B(y, r), r <= cap, that contain x.

    For each center the distinct balls are the prefixes of the distance order
    ending at a tie-group boundary; a suffix maximum over those prefixes gives
    the best ball that still reaches each point.
    """
    if not cap > 0:
        raise ValueError(f"maximal_function failed ({space.name}): cap must be positive, got {cap}")
    mass = space.weights * magnitude(u)
    out = np.zeros(space.n)
    for y in range(space.n):
        order = np.argsort(space.distances[y], kind="stable")
        ds = space.distances[y, order]
        averages = np.cumsum(mass[order]) / np.cumsum(space.weights[order])
        closes = np.append(ds[1:] > ds[:-1], True) & (ds <= cap)
        averages = np.where(closes, averages, -np.inf)
        best = np.maximum.accumulate(averages[::-1])[::-1]
        reach = np.empty(space.n)
        reach[order] = best
        out = np.maximum(out, reach)
    return out


def maximal_function_exhaustive(space: FiniteMetricMeasureSpace, u, cap: float = config.MAXIMAL_RADIUS_CAP) -> np.ndarray:
    """Brute-force enumeration of every admissible ball."""
    mass = space.weights * magnitude(u)
    out = np.zeros(space.n)
    for y in range(space.n):
        for r in np.unique(space.distances[y]):
            if r > cap:
                break
            inside = space.ball(y, r)
            average = mass[inside].sum() / space.weights[inside].sum()
            out[inside] = np.maximum(out[inside], average)
    return out
