"""Sample grids for the suites: times, scaled offsets, points, pair fans and ball clouds.

Every grid is built from a (lo, hi, n) description and refined by inserting
midpoints, so a refined grid contains the coarse one.
"""

from __future__ import annotations

import numpy as np

from heatlab.errors import UnsupportedError
from heatlab.geometry.manifolds import ModelManifold, geodesic_distance


def refined(n: int, refine: bool) -> int:
    return 2 * n - 1 if refine else n


def time_grid(lo: float, hi: float, n: int, refine: bool = False) -> np.ndarray:
    if not 0 < lo <= hi or n < 1:
        raise ValueError(f"time_grid failed: need 0 < lo <= hi and n >= 1, got ({lo}, {hi}, {n})")
    return np.geomspace(lo, hi, refined(n, refine)) if n > 1 else np.array([float(lo)])


def linear_grid(lo: float, hi: float, n: int, refine: bool = False) -> np.ndarray:
    return np.linspace(lo, hi, refined(n, refine)) if n > 1 else np.array([float(lo)])


def sample_points(M: ModelManifold, n: int, rng: np.random.Generator) -> np.ndarray:
    """n chart points, uniform on the torus and sphere (away from the chart poles), central on the patch."""
    if M.kind == "flat_torus":
        return rng.uniform(0.0, 1.0, size=(n, M.dimension)) * np.asarray(M.periods)
    if M.kind == "sphere2":
        z = rng.uniform(-0.95, 0.95, size=n)
        return np.column_stack([np.arccos(z), rng.uniform(0.0, 2.0 * np.pi, size=n)])
    radius = 0.6 * M.bound * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def directions(m: int, count: int) -> np.ndarray:
    """Unit vectors in the reference frame."""
    if m == 1:
        return np.array([[1.0]])
    if m == 2:
        angles = np.pi * np.arange(count) / max(count, 1) + 0.1
        return np.column_stack([np.cos(angles), np.sin(angles)])
    fan = np.vstack([np.eye(m), np.ones((1, m)) / np.sqrt(m)])
    return fan[:count]


def pair_fan(M: ModelManifold, y, offsets, fan: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Points exp_y(s u) for every offset s and direction u, with their true distances to y."""
    y = np.asarray(y, dtype=float)
    steps = (np.asarray(offsets, dtype=float)[:, None, None] * fan[None, :, :]).reshape(-1, M.dimension)
    xs = M.exp(np.broadcast_to(y, steps.shape), steps)
    return xs, geodesic_distance(M, xs, y)


def reach_limit(M: ModelManifold) -> float:
    """Largest offset for which the distance along a fan direction is still the offset."""
    if M.kind == "flat_torus":
        return 0.5 * min(M.periods)
    if M.kind == "sphere2":
        return 0.95 * np.pi * M.radius
    return 0.5 * M.patch_radius


def ball_cloud(M: ModelManifold, x, radius: float, n_r: int = 4, n_a: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Polar midpoint quadrature of B(x, radius) through the exponential map."""
    x = np.asarray(x, dtype=float)
    dr = radius / n_r
    r = (np.arange(n_r) + 0.5) * dr
    if M.dimension == 1:
        offsets = np.concatenate([-r[::-1], r])[:, None]
        return M.exp(np.broadcast_to(x, offsets.shape), offsets), np.full(len(offsets), dr)
    if M.dimension != 2:
        raise UnsupportedError(f"ball_cloud failed ({M.name}): only dimensions 1 and 2")
    da = 2.0 * np.pi / n_a
    a = (np.arange(n_a) + 0.5) * da
    rr, aa = np.meshgrid(r, a, indexing="ij")
    steps = np.stack([rr * np.cos(aa), rr * np.sin(aa)], axis=-1).reshape(-1, 2)
    if M.kind == "sphere2":
        jacobian = M.radius * np.sin(rr / M.radius)
    elif M.kind == "hyperbolic_patch":
        jacobian = np.sinh(rr)
    else:
        jacobian = rr
    return M.exp(np.broadcast_to(x, steps.shape), steps), (jacobian * dr * da).reshape(-1)
