"""Real spherical harmonics on a round 2-sphere and the Hodge bases built from them.

Scalar harmonics are written in the pole-free form

    Y(u) = c_m q_l^m(u_z) Re/Im (u_x + i u_y)^m,    u = p / rho,

with q_l^m the fully normalized associated Legendre function stripped of its
(1 - z^2)^{m/2} factor. That polynomial extends Y to R^3, so tangential
gradients and covariant Hessians come from ambient derivatives:
Hess f(X, Y) = D^2F(X, Y) - <X, Y> (n . grad F) / rho.

Degree 1 uses dY / sqrt(lambda) and *dY / sqrt(lambda); degree 2 uses Y vol.
"""

from __future__ import annotations

import numpy as np
from scipy.special import eval_legendre

from heatlab import config
from heatlab.errors import DomainError, UnsupportedError
from heatlab.geometry.manifolds import ModelManifold, geodesic_distance, sphere2
from heatlab.spectral.basis import SpectralBasis


def harmonic_labels(L: int, start: int = 0) -> np.ndarray:
    """(l, m, part) rows, part 0 = cosine/zonal, 1 = sine, grouped by l."""
    rows = []
    for l in range(start, L + 1):
        rows.append((l, 0, 0))
        for m in range(1, l + 1):
            rows += [(l, m, 0), (l, m, 1)]
    return np.array(rows, dtype=int).reshape(-1, 3)


def legendre_table(L: int, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """q[l, m], q'[l, m], q''[l, m] at z, each (L+1, L+1, *z.shape)."""
    z = np.asarray(z, dtype=float)
    shape = (L + 1, L + 1) + z.shape
    q, dq, ddq = np.zeros(shape), np.zeros(shape), np.zeros(shape)
    diag = np.sqrt(1.0 / (4.0 * np.pi))
    for m in range(L + 1):
        if m > 0:
            diag *= np.sqrt((2.0 * m + 1.0) / (2.0 * m))
        q[m, m] = diag
        if m + 1 <= L:
            a = np.sqrt(2.0 * m + 3.0)
            q[m + 1, m] = a * z * diag
            dq[m + 1, m] = a * diag
        for l in range(m + 2, L + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            q[l, m] = a * (z * q[l - 1, m] - b * q[l - 2, m])
            dq[l, m] = a * (q[l - 1, m] + z * dq[l - 1, m] - b * dq[l - 2, m])
            ddq[l, m] = a * (2.0 * dq[l - 1, m] + z * ddq[l - 1, m] - b * ddq[l - 2, m])
    return q, dq, ddq


def _azimuthal(m: int, x: np.ndarray, y: np.ndarray):
    """Re/Im of w^m, their first and second partials in (x, y); w = x + iy."""
    w = x + 1j * y
    zero = np.zeros_like(w)
    f = w ** m
    f1 = m * w ** (m - 1) if m >= 1 else zero
    f2 = m * (m - 1) * w ** (m - 2) if m >= 2 else zero
    # d/dx = f1, d/dy = i f1 ; d2/dx2 = f2, d2/dxdy = i f2, d2/dy2 = -f2
    return f, (f1, 1j * f1), (f2, 1j * f2, -f2)


class SphereScalarHarmonics:
    """Values, ambient gradients and covariant Hessians of Y_lm on a radius-rho sphere."""

    def __init__(self, manifold: ModelManifold, L: int):
        self.manifold = manifold
        self.L = L
        self.labels = harmonic_labels(L)

    def ambient(self, points, labels: np.ndarray):
        """(F, dF, D2F) in the ambient coordinates p, shapes (P, n), (P, n, 3), (P, n, 3, 3)."""
        rho = self.manifold.radius
        u = self.manifold.embed(points) / rho
        x, y, z = u[:, 0], u[:, 1], u[:, 2]
        q, dq, ddq = legendre_table(int(labels[:, 0].max()) if len(labels) else 0, z)
        P, n = len(u), len(labels)
        F = np.zeros((P, n))
        G = np.zeros((P, n, 3))
        H = np.zeros((P, n, 3, 3))
        for m in np.unique(labels[:, 1]):
            f, (fx, fy), (fxx, fxy, fyy) = _azimuthal(int(m), x, y)
            scale = 1.0 if m == 0 else np.sqrt(2.0)
            for part, take in ((0, np.real), (1, np.imag)):
                cols = np.flatnonzero((labels[:, 1] == m) & (labels[:, 2] == part))
                if not len(cols):
                    continue
                ls = labels[cols, 0]
                Q, dQ, ddQ = q[ls, m].T, dq[ls, m].T, ddq[ls, m].T  # (P, k)
                R, Rx, Ry = take(f)[:, None], take(fx)[:, None], take(fy)[:, None]
                Rxx, Rxy, Ryy = take(fxx)[:, None], take(fxy)[:, None], take(fyy)[:, None]
                F[:, cols] = scale * Q * R
                G[:, cols] = scale * np.stack([Q * Rx, Q * Ry, dQ * R], axis=-1)
                H[:, cols] = scale * np.stack([
                    np.stack([Q * Rxx, Q * Rxy, dQ * Rx], axis=-1),
                    np.stack([Q * Rxy, Q * Ryy, dQ * Ry], axis=-1),
                    np.stack([dQ * Rx, dQ * Ry, ddQ * R], axis=-1),
                ], axis=-2)
        # chain rule from u = p / rho, and the 1/rho normalization on a radius-rho sphere
        return F / rho, G / rho ** 2, H / rho ** 3

    def frame_derivatives(self, points, labels: np.ndarray):
        """Values (P, n), reference-frame gradients (P, n, 2) and Hessians (P, n, 2, 2)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rho = self.manifold.radius
        F, G, H = self.ambient(points, labels)
        E = self.manifold.reference_vectors(points)  # (P, 3, 2)
        normal = self.manifold.embed(points) / rho
        grad = np.einsum("pia,pni->pna", E, G)
        hess = np.einsum("pia,pnij,pjb->pnab", E, H, E)
        radial = np.einsum("pi,pni->pn", normal, G)
        hess = hess - (radial / rho)[..., None, None] * np.eye(2)
        return F, grad, hess


def hodge_star_1(v: np.ndarray) -> np.ndarray:
    """* on 1-form components (a, b) -> (-b, a) along the last axis."""
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


class SphereBasis(SpectralBasis):
    """Eigenforms of the Hodge Laplacian on Sphere2(rho), degrees 0, 1, 2."""

    def __init__(self, manifold: ModelManifold, band_limit: int, degree: int):
        if manifold.kind != "sphere2":
            raise DomainError(f"sphere_basis failed ({manifold.name}): not a round 2-sphere")
        if degree not in (0, 1, 2):
            raise UnsupportedError(f"sphere_basis failed: degree {degree} outside {{0, 1, 2}}")
        if not 1 <= band_limit <= config.SPHERE_MAX_BAND:
            raise ValueError(f"sphere_basis failed: band limit {band_limit} outside [1, {config.SPHERE_MAX_BAND}]")
        self.harmonics = SphereScalarHarmonics(manifold, band_limit)
        scalar = harmonic_labels(band_limit, start=1 if degree == 1 else 0)
        if degree == 1:
            # family 0 = exact dY, family 1 = coexact *dY, interleaved per l
            rows = []
            for l in range(1, band_limit + 1):
                block = scalar[scalar[:, 0] == l]
                rows += [np.column_stack([block, np.zeros(len(block), int)]),
                         np.column_stack([block, np.ones(len(block), int)])]
            self.labels = np.vstack(rows)
        else:
            self.labels = np.column_stack([scalar, np.zeros(len(scalar), int)])
        l = self.labels[:, 0]
        super().__init__(manifold, degree, band_limit, l * (l + 1) / manifold.radius ** 2)

    def default_resolution(self) -> int:
        return self.band_limit + 2

    def _derivatives(self, points, idx):
        idx = self._indices(idx)
        labels = self.labels[idx]
        F, grad, hess = self.harmonics.frame_derivatives(points, labels[:, :3])
        return idx, labels, F, grad, hess

    def evaluate(self, points, idx=None) -> np.ndarray:
        idx, labels, F, grad, _ = self._derivatives(points, idx)
        if self.degree != 1:
            return F[..., None]
        root = np.sqrt(self.eigenvalues[idx])[None, :, None]
        exact = grad / root
        return np.where((labels[:, 3] == 0)[None, :, None], exact, hodge_star_1(exact))

    def gradient(self, points, idx=None) -> np.ndarray:
        idx, labels, _, grad, hess = self._derivatives(points, idx)
        if self.degree != 1:
            return grad[..., None]
        root = np.sqrt(self.eigenvalues[idx])[None, :, None, None]
        exact = hess / root  # [p, n, a, b] = nabla_a (dY)_b
        return np.where((labels[:, 3] == 0)[None, :, None, None], exact, hodge_star_1(exact))

    def hessian(self, points, idx=None) -> np.ndarray:
        if self.degree != 0:
            return super().hessian(points, idx)
        return self._derivatives(points, idx)[4]


def sphere_basis(band_limit: int = config.DEFAULT_SPHERE_BAND, degree: int = 0, radius: float = 1.0) -> SphereBasis:
    return SphereBasis(sphere2(radius), band_limit, degree)


def sphere_scalar_kernel(M: ModelManifold, t: float, x, y, band_limit: int = 400) -> np.ndarray:
    """sum_l (2l+1)/(4 pi rho^2) e^{-t l(l+1)/rho^2} P_l(cos gamma), gamma the angle between x and y."""
    rho = M.radius
    cos_gamma = np.cos(geodesic_distance(M, x, y) / rho)
    l = np.arange(band_limit + 1)
    weights = (2 * l + 1) / (4.0 * np.pi * rho ** 2) * np.exp(-t * l * (l + 1) / rho ** 2)
    P = eval_legendre(l[:, None], np.atleast_1d(cos_gamma)[None, :])
    out = weights @ P
    return out.reshape(np.shape(cos_gamma))
