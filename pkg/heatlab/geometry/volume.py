"""Geodesic ball volumes on the catalog."""

from __future__ import annotations

import numpy as np
from scipy import integrate, optimize, special

from heatlab.errors import DomainError, UnsupportedError
from heatlab.geometry.manifolds import ModelManifold


def unit_ball_volume(m: int) -> float:
    return float(np.pi ** (m / 2) / special.gamma(m / 2 + 1))


def _disc_in_box(r: float, a: float, b: float) -> float:
    """Area of {|y| <= r} inside [-a, a] x [-b, b]."""
    if r <= 0:
        return 0.0
    c = min(a, r)
    u_star = np.sqrt(r * r - b * b) if r > b else 0.0
    split = min(u_star, c)

    def F(s):
        return 0.5 * (s * np.sqrt(max(r * r - s * s, 0.0)) + r * r * np.arcsin(min(s / r, 1.0)))

    return float(4.0 * (b * split + F(c) - F(split)))


def _torus_ball(periods: tuple[float, ...], r: float) -> float:
    half = np.asarray(periods) / 2.0
    m = len(periods)
    if r <= half.min():
        return unit_ball_volume(m) * r ** m
    if r >= np.linalg.norm(half):
        return float(np.prod(periods))
    if m == 1:
        return float(min(2.0 * r, periods[0]))
    if m == 2:
        return _disc_in_box(r, half[0], half[1])
    if m == 3:
        top = min(half[0], r)
        value, _ = integrate.quad(
            lambda u: _disc_in_box(np.sqrt(max(r * r - u * u, 0.0)), half[1], half[2]),
            -top, top, limit=200, epsabs=1e-13, epsrel=1e-12,
        )
        return float(value)
    raise UnsupportedError(f"torus ball volume beyond half-period needs m <= 3 (got m={m})")


def boundary_distance(M: ModelManifold, x: np.ndarray, angle: float) -> float:
    """Geodesic distance from x to the patch boundary along direction angle."""
    direction = np.array([np.cos(angle), np.sin(angle)])
    span = 2.0 * np.arctanh(np.linalg.norm(x)) + M.patch_radius

    def gap(s):
        return float(np.linalg.norm(M.exp(x, s * direction)) - M.bound)

    return float(optimize.brentq(gap, 0.0, span, xtol=1e-13))


def _hyperbolic_ball(M: ModelManifold, x: np.ndarray, r: float) -> float:
    inner = M.patch_radius - 2.0 * np.arctanh(np.linalg.norm(x))
    if r <= inner:
        return float(2.0 * np.pi * (np.cosh(r) - 1.0))

    def integrand(angle):
        return np.cosh(min(r, boundary_distance(M, x, angle))) - 1.0

    value, _ = integrate.quad(integrand, 0.0, 2.0 * np.pi, limit=200, epsabs=1e-11, epsrel=1e-10)
    return float(value)


def ball_volume(M: ModelManifold, x, r: float) -> float:
    """mu(B(x, r)); saturates at the total volume on compact spaces."""
    if not r > 0:
        raise DomainError(f"ball_volume failed ({M.name}): radius must be positive, got {r}")
    x = M.check_domain(np.asarray(x, dtype=float))
    if M.kind == "flat_torus":
        return _torus_ball(M.periods, float(r))
    if M.kind == "sphere2":
        rho = M.radius
        return float(2.0 * np.pi * rho ** 2 * (1.0 - np.cos(min(r / rho, np.pi))))
    return _hyperbolic_ball(M, x, float(r))


def ball_volumes(M: ModelManifold, xs, radii) -> np.ndarray:
    """Vectorized convenience over paired (x, r); homogeneous spaces skip the point."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    radii = np.asarray(radii, dtype=float)
    xs, radii = np.broadcast_arrays(xs, radii[..., None])
    radii = radii[..., 0]
    flat_x = xs.reshape(-1, xs.shape[-1])
    flat_r = radii.reshape(-1)
    if M.kind == "hyperbolic_patch":
        out = [ball_volume(M, x, r) for x, r in zip(flat_x, flat_r)]
    else:
        cache: dict[float, float] = {}
        out = []
        for r in flat_r:
            if r not in cache:
                cache[r] = ball_volume(M, M.default_point(), r)
            out.append(cache[r])
    return np.asarray(out).reshape(radii.shape)
