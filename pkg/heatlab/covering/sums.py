"""Gaussian sums over separated sets and the dyadic exponential sum."""

from __future__ import annotations

import numpy as np

from heatlab import config
from heatlab.covering.space import FiniteMetricMeasureSpace
from heatlab.errors import PreconditionError
from heatlab.harness.fitting import bisect_constant


def dyadic_shells(distances: np.ndarray, t: float) -> np.ndarray:
    """Shell index 0 for d <= sqrt(t), k for 2^{k-1} sqrt(t) < d <= 2^k sqrt(t)."""
    scaled = np.asarray(distances, dtype=float) / np.sqrt(t)
    with np.errstate(divide="ignore"):
        shells = np.ceil(np.log2(np.maximum(scaled, 1.0)))
    return shells.astype(int)


def gaussian_sum_check(space: FiniteMetricMeasureSpace, centers, x: int, z: int, t: float, C_bound: float,
                       scale: float = 1.0) -> dict:
    """sum_i exp(-(d(x,y_i)^2 + d(z,y_i)^2) / (scale t)) <= C e^{C t} e^{-d(x,z)^2 / (C t)} at C = C_bound.

    The measured constant is the smallest C for which the right side dominates;
    the check passes iff C_bound dominates.
    """
    if not C_bound > 0 or not scale > 0:
        raise ValueError(
            f"gaussian_sum_check failed ({space.name}): C_bound={C_bound} and scale={scale} must be positive"
        )
    rho = float(space.distances[x, z])
    if rho < np.sqrt(t):
        raise PreconditionError(
            f"gaussian_sum_check failed ({space.name}): d(x,z)={rho:.4g} < sqrt(t)={np.sqrt(t):.4g}"
        )
    centers = np.asarray(centers, dtype=int)
    dx, dz = space.distances[x, centers], space.distances[z, centers]
    terms = np.exp(-(dx ** 2 + dz ** 2) / (scale * t))
    lhs = float(terms.sum())
    rhs = float(C_bound * np.exp(C_bound * t - rho ** 2 / (C_bound * t)))

    def margin(K):
        return np.log(K) + K * t - rho ** 2 / (K * t) - np.log(lhs)

    measured = bisect_constant(margin) if lhs > 0 else 0.0
    return {
        "lhs": lhs,
        "rhs": rhs,
        "ratio": lhs / rhs if rhs > 0 else np.inf,
        "measured_constant": float(measured),
        "passed": bool(lhs <= rhs * (1.0 + config.RATIO_SLACK)),
        "shell_totals": np.bincount(dyadic_shells(dx, t), weights=terms),
    }


def exp_sum_check(s_grid, C: float = 1.0, c: float = 1.0, terms: int = 80) -> dict:
    """sum_{k>=0} e^{-s 2^k} <= C e^{-s} / (1 - e^{-c s}) on a grid of s > 0."""
    s = np.asarray(s_grid, dtype=float)
    if np.any(s <= 0):
        raise ValueError("exp_sum_check failed: s must be positive")
    powers = 2.0 ** np.arange(terms)
    lhs = np.exp(-np.outer(s, powers)).sum(axis=1)
    rhs = C * np.exp(-s) / -np.expm1(-c * s)
    ratio = lhs / rhs
    return {"s": s, "lhs": lhs, "rhs": rhs, "max_ratio": float(ratio.max()), "passed": bool(np.all(ratio <= 1.0 + config.RATIO_SLACK))}
