"""Model manifold catalog: flat tori, round 2-spheres, a Poincaré-disk patch.

Every quantity is closed-form per kind and vectorized over a leading point axis:
metric, its first/second partials, orthonormal frames, distances, exponential
maps and the ambient pictures (R^3 for the sphere, the hyperboloid for the disk)
used by the path steppers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from heatlab import config
from heatlab.errors import DomainError

KINDS = ("flat_torus", "sphere2", "hyperbolic_patch")


@dataclass(frozen=True)
class ModelManifold:
    """Chart-defined Riemannian manifold from the catalog."""
    kind: str
    dimension: int
    periods: tuple[float, ...] = ()
    radius: float = 1.0  # sphere radius
    bound: float = config.HYPERBOLIC_BOUND  # Poincare-disk coordinate radius

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown manifold kind {self.kind!r} (expected one of {KINDS})")
        if self.kind == "flat_torus":
            if len(self.periods) != self.dimension or min(self.periods) <= 0:
                raise ValueError("flat torus needs one positive period per axis")
        elif self.dimension != 2:
            raise ValueError(f"{self.kind} is two-dimensional")
        if self.kind == "sphere2" and self.radius <= 0:
            raise ValueError("sphere radius must be positive")
        if self.kind == "hyperbolic_patch" and not 0 < self.bound < 1:
            raise ValueError("hyperbolic patch bound must lie in (0, 1)")

    # -- identity ---------------------------------------------------------

    @property
    def name(self) -> str:
        if self.kind == "flat_torus":
            return f"flat_torus{self.dimension}"
        if self.kind == "sphere2":
            return "sphere2" if self.radius == 1.0 else f"sphere2_r{self.radius:g}"
        return f"hyperbolic_patch_b{self.bound:g}"

    @property
    def sectional_curvature(self) -> float:
        if self.kind == "flat_torus":
            return 0.0
        if self.kind == "sphere2":
            return 1.0 / self.radius ** 2
        return -1.0

    @property
    def compact(self) -> bool:
        return self.kind != "hyperbolic_patch"

    @property
    def total_volume(self) -> float:
        if self.kind == "flat_torus":
            return float(np.prod(self.periods))
        if self.kind == "sphere2":
            return 4.0 * np.pi * self.radius ** 2
        b2 = self.bound ** 2
        return 4.0 * np.pi * b2 / (1.0 - b2)

    @property
    def patch_radius(self) -> float:
        """Hyperbolic radius of the patch around the origin."""
        return 2.0 * np.arctanh(self.bound)

    def default_point(self) -> np.ndarray:
        if self.kind == "sphere2":
            return np.array([1.2, 0.3])
        return np.zeros(self.dimension)

    # -- chart domain -----------------------------------------------------

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        finite = np.all(np.isfinite(x), axis=-1)
        if self.kind == "flat_torus":
            return finite
        if self.kind == "sphere2":
            return finite & (x[..., 0] > 0.0) & (x[..., 0] < np.pi)
        return finite & (np.sum(x ** 2, axis=-1) < self.bound ** 2)

    def check_domain(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.dimension,):
            raise DomainError(f"{self.name}: expected chart points of dimension {self.dimension}, got shape {x.shape}")
        if not np.all(self.contains(x)):
            raise DomainError(f"{self.name}: point outside the chart domain")
        return x

    # -- metric -----------------------------------------------------------

    def _conformal(self, x: np.ndarray) -> np.ndarray:
        return 2.0 / (1.0 - np.sum(x ** 2, axis=-1))

    def metric(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lead = x.shape[:-1]
        m = self.dimension
        if self.kind == "flat_torus":
            return np.broadcast_to(np.eye(m), lead + (m, m)).copy()
        g = np.zeros(lead + (2, 2))
        if self.kind == "sphere2":
            r2 = self.radius ** 2
            g[..., 0, 0] = r2
            g[..., 1, 1] = r2 * np.sin(x[..., 0]) ** 2
            return g
        lam2 = self._conformal(x) ** 2
        g[..., 0, 0] = lam2
        g[..., 1, 1] = lam2
        return g

    def metric_derivatives(self, x) -> tuple[np.ndarray, np.ndarray]:
        """(dg, ddg) with dg[..., c, a, b] = d_c g_ab and ddg[..., c, d, a, b] = d_c d_d g_ab."""
        x = np.asarray(x, dtype=float)
        lead = x.shape[:-1]
        m = self.dimension
        dg = np.zeros(lead + (m, m, m))
        ddg = np.zeros(lead + (m, m, m, m))
        if self.kind == "flat_torus":
            return dg, ddg
        if self.kind == "sphere2":
            r2 = self.radius ** 2
            theta = x[..., 0]
            dg[..., 0, 1, 1] = r2 * np.sin(2.0 * theta)
            ddg[..., 0, 0, 1, 1] = 2.0 * r2 * np.cos(2.0 * theta)
            return dg, ddg
        lam = self._conformal(x)
        eye = np.eye(2)
        # d_c (lam^2) = 2 lam^3 x_c ; d_c d_d (lam^2) = 6 lam^4 x_c x_d + 2 lam^3 delta_cd
        d_lam2 = 2.0 * lam[..., None] ** 3 * x
        dd_lam2 = (6.0 * lam[..., None, None] ** 4 * x[..., :, None] * x[..., None, :]
                   + 2.0 * lam[..., None, None] ** 3 * eye)
        dg = d_lam2[..., :, None, None] * eye
        ddg = dd_lam2[..., :, :, None, None] * eye
        return dg, ddg

    def orthonormal_frame(self, x) -> np.ndarray:
        """Columns: Gram-Schmidt of the coordinate frame (E = L^{-T}, g = L L^T)."""
        g = self.metric(x)
        L = np.linalg.cholesky(g)
        return np.swapaxes(np.linalg.inv(L), -1, -2)

    def volume_density(self, x) -> np.ndarray:
        return np.sqrt(np.linalg.det(self.metric(x)))

    # -- ambient pictures ---------------------------------------------------

    def embed(self, x) -> np.ndarray:
        """Sphere: point of R^3 of norm rho. Disk: hyperboloid point (P0, P1, P2)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "sphere2":
            th, ph = x[..., 0], x[..., 1]
            st = np.sin(th)
            return self.radius * np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)], axis=-1)
        if self.kind == "hyperbolic_patch":
            s = np.sum(x ** 2, axis=-1)
            denom = 1.0 - s
            return np.concatenate([((1.0 + s) / denom)[..., None], 2.0 * x / denom[..., None]], axis=-1)
        raise ValueError("flat torus has no ambient picture")

    def chart_from_embedded(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.kind == "sphere2":
            rho = np.linalg.norm(p, axis=-1)
            theta = np.arccos(np.clip(p[..., 2] / rho, -1.0, 1.0))
            phi = np.arctan2(p[..., 1], p[..., 0])
            return np.stack([theta, phi], axis=-1)
        return p[..., 1:] / (1.0 + p[..., :1])

    def reference_vectors(self, x) -> np.ndarray:
        """Ambient images of the reference orthonormal frame, shape (..., 3, 2)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "sphere2":
            th, ph = x[..., 0], x[..., 1]
            ct, st, cp, sp = np.cos(th), np.sin(th), np.cos(ph), np.sin(ph)
            e_theta = np.stack([ct * cp, ct * sp, -st], axis=-1)
            e_phi = np.stack([-sp, cp, np.zeros_like(ph)], axis=-1)
            return np.stack([e_theta, e_phi], axis=-1)
        lam = self._conformal(x)
        # e_b = (lam x_b, delta_ib + lam x_i x_b)
        top = lam[..., None] * x
        body = np.eye(2) + lam[..., None, None] * x[..., :, None] * x[..., None, :]
        return np.concatenate([top[..., None, :], body], axis=-2)

    def ambient_inner(self, u, v) -> np.ndarray:
        """Euclidean (sphere) or Minkowski (hyperboloid) inner product over the last axis."""
        if self.kind == "hyperbolic_patch":
            return -u[..., 0] * v[..., 0] + np.sum(u[..., 1:] * v[..., 1:], axis=-1)
        return np.sum(u * v, axis=-1)

    # -- distances and geodesics -------------------------------------------

    def wrap(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "flat_torus":
            return np.mod(x, np.asarray(self.periods))
        return x

    def exp(self, x, v) -> np.ndarray:
        """Exponential map; v holds components in the reference orthonormal frame at x."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind == "flat_torus":
            return self.wrap(x + v)
        x, v = np.broadcast_arrays(x, v)
        P = self.embed(x)
        w = np.einsum("...ia,...a->...i", self.reference_vectors(x), v)
        a = np.linalg.norm(v, axis=-1)
        safe = np.where(a > 0, a, 1.0)
        what = w / safe[..., None]
        if self.kind == "sphere2":
            ang = (a / self.radius)[..., None]
            out = np.cos(ang) * P + self.radius * np.sin(ang) * what
        else:
            out = np.cosh(a)[..., None] * P + np.sinh(a)[..., None] * what
        out = np.where((a > 0)[..., None], out, P)
        return self.chart_from_embedded(out)


def geodesic_distance(M: ModelManifold, x, y) -> np.ndarray:
    """Closed-form geodesic distance, broadcasting over leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if M.kind == "flat_torus":
        periods = np.asarray(M.periods)
        d = np.mod(x - y, periods)
        d = np.minimum(d, periods - d)
        return np.sqrt(np.sum(d ** 2, axis=-1))
    if M.kind == "sphere2":
        p = M.embed(x)
        q = M.embed(y)
        cross = np.linalg.norm(np.cross(p, q), axis=-1)
        dot = np.sum(p * q, axis=-1)
        return M.radius * np.arctan2(cross, dot)
    diff2 = np.sum((x - y) ** 2, axis=-1)
    denom = np.sqrt(diff2 + (1.0 - np.sum(x ** 2, axis=-1)) * (1.0 - np.sum(y ** 2, axis=-1)))
    return 2.0 * np.arctanh(np.sqrt(diff2) / denom)


def flat_torus(periods=None, dimension: int = 2) -> ModelManifold:
    if periods is None:
        periods = (config.DEFAULT_PERIOD,) * dimension
    periods = tuple(float(p) for p in periods)
    return ModelManifold("flat_torus", len(periods), periods=periods)


def sphere2(radius: float = 1.0) -> ModelManifold:
    return ModelManifold("sphere2", 2, radius=float(radius))


def hyperbolic_patch(bound: float = config.HYPERBOLIC_BOUND) -> ModelManifold:
    return ModelManifold("hyperbolic_patch", 2, bound=float(bound))


def manifold_from_spec(spec: dict) -> ModelManifold:
    """Build a catalog manifold from a config mapping {"kind": ..., parameters}."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "flat_torus":
        periods = spec.pop("periods", None)
        dimension = int(spec.pop("dimension", 2 if periods is None else len(periods)))
        M = flat_torus(periods, dimension)
    elif kind == "sphere2":
        M = sphere2(spec.pop("radius", 1.0))
    elif kind == "hyperbolic_patch":
        M = hyperbolic_patch(spec.pop("bound", config.HYPERBOLIC_BOUND))
    else:
        raise ValueError(f"unknown manifold kind {kind!r} (expected one of {KINDS})")
    if spec:
        raise ValueError(f"unexpected manifold parameters for {kind}: {sorted(spec)}")
    return M
