"""Pointwise kernel oracles for the Gaussian-bound suites.

Flat tori use the exact image sums (any t > 0); the form kernel is the scalar
kernel times the identity. Spheres use the truncated eigen-expansion with its
tail check. Values are operator norms of the kernel blocks.
"""

from __future__ import annotations

import numpy as np

from heatlab import config
from heatlab.errors import UnsupportedError
from heatlab.geometry.exterior import form_dimension, interior_matrices, wedge_matrices
from heatlab.geometry.manifolds import ModelManifold
from heatlab.geometry.volume import ball_volumes
from heatlab.spectral.kernels import check_truncation, minimum_time
from heatlab.spectral.quadrature import quadrature
from heatlab.spectral.sphere import SphereBasis, sphere_scalar_kernel
from heatlab.spectral.torus import torus_image_grad_kernel, torus_image_kernel

KINDS = ("kernel", "gradient", "d", "ddagger")


def block_norms(blocks: np.ndarray) -> np.ndarray:
    """Spectral norms of (P, rows, cols) blocks; empty blocks give 0."""
    if blocks.shape[-1] == 0 or blocks.shape[-2] == 0:
        return np.zeros(blocks.shape[0])
    return np.linalg.norm(blocks, ord=2, axis=(-2, -1))


class KernelOracle:
    def __init__(self, M: ModelManifold, j: int, band_limit: int | None = None,
                 tol: float = config.TAIL_TOLERANCE):
        self.M = M
        self.j = j
        self.m = M.dimension
        self.N = form_dimension(self.m, j)
        self.tol = tol
        if M.kind == "sphere2":
            self.basis = SphereBasis(M, band_limit or config.DEFAULT_SPHERE_BAND, j)
        elif M.kind == "flat_torus":
            self.basis = None
        else:
            raise UnsupportedError(f"KernelOracle failed ({M.name}): no pointwise kernel oracle")

    def min_time(self, kind: str = "kernel") -> float:
        if self.basis is None:
            return 0.0
        return minimum_time(self.basis, self.tol, gradient=kind != "kernel")

    def volume(self, xs, t: float) -> np.ndarray:
        xs = np.atleast_2d(xs)
        return ball_volumes(self.M, xs, np.full(len(xs), np.sqrt(t)))

    def norms(self, kind: str, t: float, xs, y) -> np.ndarray:
        """|K(x, y)| for the kernel of e^{-t Delta_j} or of D e^{-t Delta_j}, D acting on x."""
        if kind not in KINDS:
            raise ValueError(f"KernelOracle failed: unknown kind {kind!r}")
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        y = np.asarray(y, dtype=float)
        if self.basis is None:
            return self._torus(kind, t, xs, y)
        return self._spectral(kind, t, xs, y)

    def diagonal(self, t: float, x) -> float:
        return float(self.norms("kernel", t, np.atleast_2d(x), x)[0])

    def _torus(self, kind: str, t: float, xs: np.ndarray, y: np.ndarray) -> np.ndarray:
        if kind == "kernel":
            return torus_image_kernel(self.M, t, xs, y)
        g = torus_image_grad_kernel(self.M, t, xs, y)
        if kind == "gradient":
            return np.linalg.norm(g, axis=-1)
        if kind == "d":
            if self.j == self.m:
                return np.zeros(len(xs))
            return block_norms(np.einsum("pa,aKJ->pKJ", g, wedge_matrices(self.m, self.j)))
        if self.j == 0:
            return np.zeros(len(xs))
        return block_norms(-np.einsum("pa,aKJ->pKJ", g, interior_matrices(self.m, self.j)))

    def _spectral(self, kind: str, t: float, xs: np.ndarray, y: np.ndarray) -> np.ndarray:
        basis = self.basis
        check_truncation(basis, t, self.tol, gradient=kind != "kernel")
        decay = np.exp(-t * basis.eigenvalues)
        ey = basis.evaluate(np.atleast_2d(y))[0]
        if kind == "kernel":
            left = basis.evaluate(xs)
        elif kind == "gradient":
            left = basis.gradient(xs).reshape(len(xs), basis.size, -1)
        elif kind == "d":
            left = basis.d_image(xs)
        else:
            left = basis.codifferential_image(xs)
        return block_norms(np.einsum("n,pnK,nJ->pKJ", decay, left, ey))


def scalar_kernel(M: ModelManifold, t: float, x, y) -> np.ndarray:
    """Scalar heat kernel of e^{-t Delta_0}, broadcasting x and y over leading axes."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    lead = x.shape[:-1]
    xf, yf = x.reshape(-1, M.dimension), y.reshape(-1, M.dimension)
    if M.kind == "flat_torus":
        values = torus_image_kernel(M, t, xf, yf)
    elif M.kind == "sphere2":
        values = sphere_scalar_kernel(M, t, xf, yf)
    else:
        raise UnsupportedError(f"scalar_kernel failed ({M.name}): no scalar kernel oracle")
    return values.reshape(lead)


def oracle_quadrature(oracle: KernelOracle, resolution: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature fine enough for the oracle's kernels; image-kernel tori default to 128 points per axis."""
    if oracle.basis is not None:
        return oracle.basis.quadrature(resolution)
    return quadrature(oracle.M, resolution or 128)
