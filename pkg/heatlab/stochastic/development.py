"""Stochastic development of Brownian motion through the orthonormal frame bundle.

The driving increments dW are the anti-development; generator 1/2 Delta. Frames
are stored relative to the reference orthonormal frame of the chart, so a frame
O at x_k maps transported components to reference components.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from heatlab.errors import DomainError
from heatlab.geometry.curvature import christoffel
from heatlab.geometry.manifolds import ModelManifold, geodesic_distance
from heatlab.models import DevelopedPath, PathConfig
from heatlab.stochastic.streams import gaussian_increments


def path_horizon(T: float) -> float:
    """Path horizon t producing the semigroup e^{-T Delta} (t = 2T)."""
    if not T > 0:
        raise ValueError(f"path_horizon failed (T={T}): semigroup time must be positive")
    return 2.0 * T


def reorthonormalize(F: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Symmetric (polar) orthonormalization of the columns of F in the inner product W."""
    G = np.einsum("...ia,...ij,...jb->...ab", F, W, F)
    w, U = np.linalg.eigh(G)
    inv_sqrt = np.einsum("...ab,...b,...cb->...ac", U, 1.0 / np.sqrt(w), U)
    return F @ inv_sqrt


def _minkowski(M: ModelManifold) -> np.ndarray:
    if M.kind == "hyperbolic_patch":
        return np.diag([-1.0, 1.0, 1.0])
    return np.eye(3)


# -- ambient steppers (sphere in R^3, disk on the hyperboloid) -----------------

def _sphere_geodesic(M, p, F, dw):
    rho = M.radius
    v = np.einsum("pia,pa->pi", F, dw)
    norm = np.linalg.norm(v, axis=-1)
    vhat = v / np.where(norm > 0, norm, 1.0)[:, None]
    a = (norm / rho)[:, None]
    p_new = np.cos(a) * p + rho * np.sin(a) * vhat
    along = np.einsum("pi,pia->pa", vhat, F)
    F_new = F + np.einsum("pi,pa->pia", (np.cos(a) - 1.0) * vhat - np.sin(a) * p / rho, along)
    return p_new, F_new


def _sphere_heun(M, p, F, dw):
    r2 = M.radius ** 2
    dp1 = np.einsum("pia,pa->pi", F, dw)
    dF1 = -np.einsum("pi,pa->pia", p, dw) / r2
    p1, F1 = p + dp1, F + dF1
    dp2 = np.einsum("pia,pa->pi", F1, dw)
    dF2 = -np.einsum("pi,pa->pia", p1, dw) / r2
    return p + 0.5 * (dp1 + dp2), F + 0.5 * (dF1 + dF2)


def _hyperboloid_geodesic(M, p, F, dw):
    v = np.einsum("pia,pa->pi", F, dw)
    norm = np.sqrt(np.maximum(M.ambient_inner(v, v), 0.0))
    vhat = v / np.where(norm > 0, norm, 1.0)[:, None]
    a = norm[:, None]
    p_new = np.cosh(a) * p + np.sinh(a) * vhat
    along = np.einsum("pi,ij,pja->pa", vhat, _minkowski(M), F)
    F_new = F + np.einsum("pi,pa->pia", (np.cosh(a) - 1.0) * vhat + np.sinh(a) * p, along)
    return p_new, F_new


def _project(M, p, F):
    """Back onto the sphere/hyperboloid and its tangent space."""
    if M.kind == "sphere2":
        p = M.radius * p / np.linalg.norm(p, axis=-1, keepdims=True)
        F = F - np.einsum("pi,pa->pia", p, np.einsum("pi,pia->pa", p, F)) / M.radius ** 2
        return p, F
    scale = np.sqrt(np.maximum(-M.ambient_inner(p, p), 1e-300))
    p = p / scale[:, None]
    # w + <w, p> p with <p, p> = -1
    inner = np.einsum("pi,ij,pja->pa", p, _minkowski(M), F)
    return p, F + np.einsum("pi,pa->pia", p, inner)


_AMBIENT_STEPS = {
    ("sphere2", "geodesic_step"): _sphere_geodesic,
    ("sphere2", "euler_heun"): _sphere_heun,
    ("hyperbolic_patch", "geodesic_step"): _hyperboloid_geodesic,
}


def _chart_heun(M, x, E, dw):
    """Stratonovich Heun step of dx = E dW, dE = -Gamma(dx, E) in the chart."""
    def increments(x, E):
        dx = np.einsum("pab,pb->pa", E, dw)
        dE = -np.einsum("pcbd,pb,pda->pca", christoffel(M, x), dx, E)
        return dx, dE

    dx1, dE1 = increments(x, E)
    dx2, dE2 = increments(x + dx1, E + dE1)
    return x + 0.5 * (dx1 + dx2), E + 0.5 * (dE1 + dE2)


# -- drivers --------------------------------------------------------------------

def _empty(P: int, n: int, m: int, ambient: int | None):
    points = np.full((P, n + 1, m), np.nan)
    frames = np.full((P, n + 1, m, m), np.nan)
    embedded = None if ambient is None else np.full((P, n + 1, ambient), np.nan)
    return points, frames, embedded


def _develop_torus(M, x0, dW):
    P, n, m = dW.shape
    walk = np.concatenate([np.zeros((P, 1, m)), np.cumsum(dW, axis=1)], axis=1)
    points = M.wrap(x0 + walk)
    frames = np.broadcast_to(np.eye(m), (P, n + 1, m, m)).copy()
    return points, frames, None, np.full(P, -1)


def _develop_ambient(M, x0, dW, step):
    P, n, m = dW.shape
    eta = _minkowski(M)
    points, frames, embedded = _empty(P, n, m, 3)
    p = np.broadcast_to(M.embed(x0), (P, 3)).copy()
    F = np.broadcast_to(M.reference_vectors(x0), (P, 3, 2)).copy()
    alive = np.ones(P, dtype=bool)
    boundary = np.full(P, -1)
    points[:, 0], embedded[:, 0] = x0, p
    frames[:, 0] = np.eye(m)
    for k in range(n):
        p_new, F_new = _project(M, *step(M, p, F, dW[:, k]))
        F_new = reorthonormalize(F_new, eta)
        x = M.chart_from_embedded(p_new)
        if M.kind == "hyperbolic_patch":
            inside = M.contains(x)
            boundary[alive & ~inside] = k + 1
            alive &= inside
        p = np.where(alive[:, None], p_new, p)
        F = np.where(alive[:, None, None], F_new, F)
        if not alive.any():
            break
        ref = M.reference_vectors(x[alive])
        points[alive, k + 1] = x[alive]
        embedded[alive, k + 1] = p[alive]
        frames[alive, k + 1] = np.einsum("pib,ij,pja->pba", ref, eta, F[alive])
    return points, frames, embedded, boundary


def _develop_chart(M, x0, dW):
    P, n, m = dW.shape
    points, frames, _ = _empty(P, n, m, None)
    x = np.broadcast_to(x0, (P, m)).copy()
    E = np.broadcast_to(M.orthonormal_frame(x0), (P, m, m)).copy()
    alive = np.ones(P, dtype=bool)
    boundary = np.full(P, -1)
    points[:, 0] = x0
    frames[:, 0] = np.eye(m)
    for k in range(n):
        x_new, E_new = _chart_heun(M, x, E, dW[:, k])
        inside = M.contains(x_new)
        boundary[alive & ~inside] = k + 1
        alive &= inside
        if not alive.any():
            break
        x[alive] = x_new[alive]
        g = M.metric(x[alive])
        E[alive] = reorthonormalize(E_new[alive], g)
        ref = M.orthonormal_frame(x[alive])
        points[alive, k + 1] = x[alive]
        frames[alive, k + 1] = np.einsum("pib,pij,pja->pba", ref, g, E[alive])
    return points, frames, None, boundary


def develop_path(M: ModelManifold, x0, cfg: PathConfig, n_paths: int = 1, indices=None) -> DevelopedPath:
    """Simulate a batch of developed paths started at x0.

    Paths are indexed; path i always sees the same increments for a given
    master seed. On the hyperbolic patch a path that leaves the chart is
    truncated: its points become NaN and boundary_index records the first
    outside step.
    """
    x0 = M.check_domain(np.asarray(x0, dtype=float))
    if x0.ndim != 1:
        raise DomainError(f"develop_path failed ({M.name}): x0 must be a single point")
    indices = np.arange(n_paths) if indices is None else np.asarray(indices, dtype=np.int64)
    dW = gaussian_increments(cfg.master_seed, indices, cfg.n_steps, M.dimension, cfg.dt)
    if M.kind == "flat_torus":
        points, frames, embedded, boundary = _develop_torus(M, x0, dW)
    elif M.kind == "hyperbolic_patch" and cfg.scheme == "euler_heun":
        points, frames, embedded, boundary = _develop_chart(M, x0, dW)
    else:
        points, frames, embedded, boundary = _develop_ambient(M, x0, dW, _AMBIENT_STEPS[(M.kind, cfg.scheme)])
    finite = np.all(np.isfinite(points), axis=-1)
    radial = np.full(finite.shape, np.inf)
    radial[finite] = geodesic_distance(M, points[finite], x0)
    return DevelopedPath(
        config=cfg,
        path_indices=indices,
        points=points,
        frames=frames,
        increments=dW,
        radial=radial,
        boundary_index=boundary,
        embedded=embedded,
    )


def frame_defect(path: DevelopedPath) -> float:
    """max |O^T O - I| over finite steps."""
    O = path.frames
    ok = np.all(np.isfinite(O), axis=(-2, -1))
    gram = np.einsum("...ba,...bc->...ac", O[ok], O[ok])
    return float(np.max(np.abs(gram - np.eye(O.shape[-1])))) if ok.any() else 0.0


def dump_path(path: DevelopedPath, index: int, destination) -> Path:
    """Columnar text dump of one path: s, x, frame (row-major), dW (NaN on the last row)."""
    destination = Path(destination)
    m = path.points.shape[-1]
    n = path.config.n_steps
    dW = np.vstack([path.increments[index], np.full((1, m), np.nan)])
    table = np.column_stack([
        path.times,
        path.points[index],
        path.frames[index].reshape(n + 1, m * m),
        dW,
    ])
    header = " ".join(
        ["s"] + [f"x{a}" for a in range(m)]
        + [f"O{b}{a}" for b in range(m) for a in range(m)]
        + [f"dW{a}" for a in range(m)]
    )
    destination.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(destination, table, header=header, fmt="%.17g")
    return destination
