"""Fourier bases on flat tori and the image-sum (theta) kernel."""

from __future__ import annotations

from itertools import product

import numpy as np
from scipy.special import logsumexp

from heatlab.errors import DomainError
from heatlab.geometry.manifolds import ModelManifold, flat_torus
from heatlab.spectral.basis import SpectralBasis

CONSTANT, COSINE, SINE = 0, 1, 2


def half_lattice(m: int, L: int) -> list[tuple[int, ...]]:
    """Nonzero n with |n|_inf <= L whose first nonzero entry is positive."""
    out = []
    for n in product(range(-L, L + 1), repeat=m):
        nz = [v for v in n if v != 0]
        if nz and nz[0] > 0:
            out.append(n)
    return out


class TorusBasis(SpectralBasis):
    """Real Fourier modes tensored with the constant coframe; V_j = 0."""

    def __init__(self, manifold: ModelManifold, band_limit: int, degree: int):
        if manifold.kind != "flat_torus":
            raise DomainError(f"torus_basis failed ({manifold.name}): not a flat torus")
        m = manifold.dimension
        periods = np.asarray(manifold.periods)
        vol = manifold.total_volume
        modes = [(np.zeros(m, dtype=int), CONSTANT)]
        for n in half_lattice(m, band_limit):
            modes += [(np.array(n), COSINE), (np.array(n), SINE)]
        super().__init__(manifold, degree, band_limit, np.zeros(0))
        N = self.components
        waves = np.array([2.0 * np.pi * n / periods for n, _ in modes])
        kinds = np.array([k for _, k in modes])
        lam = np.sum(waves ** 2, axis=1)
        order = np.argsort(np.repeat(lam, N), kind="stable")
        self.eigenvalues = np.repeat(lam, N)[order]
        self.lattice = np.repeat(np.array([n for n, _ in modes]), N, axis=0)[order]
        self.waves = np.repeat(waves, N, axis=0)[order]
        self.kinds = np.repeat(kinds, N)[order]
        self.comps = np.tile(np.arange(N), len(modes))[order]
        self.norms = np.where(self.kinds == CONSTANT, 1.0 / np.sqrt(vol), np.sqrt(2.0 / vol))

    def default_resolution(self) -> int:
        return 2 * self.band_limit + 2

    def _profile(self, points, idx):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        idx = self._indices(idx)
        phase = points @ self.waves[idx].T
        kinds = self.kinds[idx]
        c, s = np.cos(phase), np.sin(phase)
        value = np.where(kinds == COSINE, c, np.where(kinds == SINE, s, 1.0)) * self.norms[idx]
        slope = np.where(kinds == COSINE, -s, np.where(kinds == SINE, c, 0.0)) * self.norms[idx]
        return idx, value, slope

    def evaluate(self, points, idx=None) -> np.ndarray:
        idx, value, _ = self._profile(points, idx)
        return value[..., None] * np.eye(self.components)[self.comps[idx]][None]

    def gradient(self, points, idx=None) -> np.ndarray:
        idx, _, slope = self._profile(points, idx)
        grad = slope[..., None] * self.waves[idx][None]  # (P, n, m)
        return grad[..., None] * np.eye(self.components)[self.comps[idx]][None, :, None, :]

    def hessian(self, points, idx=None) -> np.ndarray:
        if self.degree != 0:
            return super().hessian(points, idx)
        idx, value, _ = self._profile(points, idx)
        k = self.waves[idx]
        return -value[..., None, None] * np.einsum("na,nb->nab", k, k)[None]

    def find(self, n, kind: int = COSINE, component: int = 0) -> int:
        """Entry index of a lattice mode."""
        hit = np.flatnonzero(np.all(self.lattice == np.asarray(n), axis=1)
                             & (self.kinds == kind) & (self.comps == component))
        if not len(hit):
            raise ValueError(f"find failed ({self.tag}): no mode {tuple(n)} kind={kind} component={component}")
        return int(hit[0])


def torus_basis(m: int = 2, periods=None, band_limit: int = 8, degree: int = 0) -> TorusBasis:
    return TorusBasis(flat_torus(periods, m), band_limit, degree)


def _shifts(M: ModelManifold, t: float) -> np.ndarray:
    periods = np.asarray(M.periods)
    reach = int(np.ceil(np.sqrt(4.0 * t * 750.0) / periods.min())) + 1
    return np.array(list(product(range(-reach, reach + 1), repeat=M.dimension))) * periods


def torus_image_log_kernel(M: ModelManifold, t: float, x, y) -> np.ndarray:
    """log of the scalar heat kernel of e^{-t Delta}: sum over images of the Euclidean Gaussian."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = np.mod(x - y, np.asarray(M.periods))
    sq = np.sum((diff[..., None, :] + _shifts(M, t)) ** 2, axis=-1)
    return logsumexp(-sq / (4.0 * t), axis=-1) - 0.5 * M.dimension * np.log(4.0 * np.pi * t)


def torus_image_kernel(M: ModelManifold, t: float, x, y) -> np.ndarray:
    return np.exp(torus_image_log_kernel(M, t, x, y))


def torus_image_grad_kernel(M: ModelManifold, t: float, x, y) -> np.ndarray:
    """nabla_x of the image kernel, (..., m)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = np.mod(x - y, np.asarray(M.periods))[..., None, :] + _shifts(M, t)
    log_terms = -np.sum(diff ** 2, axis=-1) / (4.0 * t) - 0.5 * M.dimension * np.log(4.0 * np.pi * t)
    return np.sum(-diff / (2.0 * t) * np.exp(log_terms)[..., None], axis=-2)
