"""Quadrature rules on the catalog: (chart points, weights) with sum(weights) = volume."""

from __future__ import annotations

import numpy as np

from heatlab.geometry.manifolds import ModelManifold


def torus_quadrature(periods, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform n^m grid; exact for trigonometric polynomials of degree < n per axis."""
    periods = np.asarray(periods, dtype=float)
    axes = [np.arange(n) * p / n for p in periods]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(periods))
    weights = np.full(len(grid), np.prod(periods) / n ** len(periods))
    return grid, weights


def sphere_quadrature(radius: float, n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre in cos(theta) times uniform phi.

    Exact for polynomials in the ambient coordinates of degree <= min(2 n_theta - 1, n_phi - 1).
    """
    z, wz = np.polynomial.legendre.leggauss(n_theta)
    phi = (np.arange(n_phi) + 0.5) * 2.0 * np.pi / n_phi
    theta = np.arccos(z)
    points = np.stack(np.meshgrid(theta, phi, indexing="ij"), axis=-1).reshape(-1, 2)
    weights = (radius ** 2 * wz[:, None] * np.full(n_phi, 2.0 * np.pi / n_phi)[None, :]).reshape(-1)
    return points, weights


def disk_quadrature(bound: float, n_radial: int, n_angle: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre in the chart radius times uniform angle, hyperbolic area weights."""
    s, ws = np.polynomial.legendre.leggauss(n_radial)
    rad = 0.5 * bound * (s + 1.0)
    w_rad = 0.5 * bound * ws
    ang = (np.arange(n_angle) + 0.5) * 2.0 * np.pi / n_angle
    R, A = np.meshgrid(rad, ang, indexing="ij")
    points = np.stack([R * np.cos(A), R * np.sin(A)], axis=-1).reshape(-1, 2)
    density = (2.0 / (1.0 - R ** 2)) ** 2 * R
    weights = (density * w_rad[:, None] * 2.0 * np.pi / n_angle).reshape(-1)
    return points, weights


def quadrature(M: ModelManifold, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Default rule per kind at a given resolution (points per axis)."""
    if M.kind == "flat_torus":
        return torus_quadrature(M.periods, resolution)
    if M.kind == "sphere2":
        return sphere_quadrature(M.radius, resolution, 2 * resolution)
    return disk_quadrature(M.bound, resolution, 2 * resolution)


def mask_weights(weights: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Quadrature weights restricted to a point mask (indicator multiplication)."""
    return np.where(mask, weights, 0.0)
