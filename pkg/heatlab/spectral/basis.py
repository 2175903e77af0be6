"""Spectral bases of Hodge Laplacians and the multiplier calculus on their coefficients.

A basis is a finite family of L^2-orthonormal j-forms, indexed by entry, with
eigenvalues in nondecreasing order. Subclasses provide evaluate, gradient and
quadrature; d and d-dagger images follow from the gradient through the exterior
algebra of the orthonormal coframe.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from heatlab.errors import UnsupportedError
from heatlab.geometry.exterior import form_dimension, interior_matrices, wedge_matrices
from heatlab.geometry.manifolds import ModelManifold
from heatlab.models import FormField
from heatlab.spectral.quadrature import quadrature as manifold_quadrature


class SpectralBasis:
    """Eigen-decomposition of the Hodge Laplacian on j-forms, truncated at a band limit."""

    spectral = True

    def __init__(self, manifold: ModelManifold, degree: int, band_limit: int, eigenvalues: np.ndarray):
        self.manifold = manifold
        self.degree = degree
        self.band_limit = band_limit
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.components = form_dimension(manifold.dimension, degree)

    @property
    def dimension(self) -> int:
        return self.manifold.dimension

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def tag(self) -> str:
        return f"{self.manifold.name}_j{self.degree}_L{self.band_limit}"

    def _indices(self, idx) -> np.ndarray:
        return np.arange(self.size) if idx is None else np.asarray(idx, dtype=np.int64)

    # -- evaluators ---------------------------------------------------------------

    def evaluate(self, points, idx=None) -> np.ndarray:
        """(P, n, N) components of the selected entries."""
        raise NotImplementedError

    def gradient(self, points, idx=None) -> np.ndarray:
        """(P, n, m, N): nabla_{e_a} of each entry in the reference frame."""
        raise NotImplementedError

    def hessian(self, points, idx=None) -> np.ndarray:
        raise UnsupportedError(f"hessian failed ({self.tag}): only scalar bases carry second derivatives")

    def d_image(self, points, idx=None) -> np.ndarray:
        """(P, n, N_{j+1}): d = sum_a e^a ∧ nabla_a."""
        if self.degree == self.dimension:
            return np.zeros(np.shape(points)[:1] + (len(self._indices(idx)), 0))
        W = wedge_matrices(self.dimension, self.degree)
        return np.einsum("aKJ,pnaJ->pnK", W, self.gradient(points, idx))

    def codifferential_image(self, points, idx=None) -> np.ndarray:
        """(P, n, N_{j-1}): d-dagger = -sum_a i_{e_a} nabla_a."""
        if self.degree == 0:
            return np.zeros(np.shape(points)[:1] + (len(self._indices(idx)), 0))
        I = interior_matrices(self.dimension, self.degree)
        return -np.einsum("aKJ,pnaJ->pnK", I, self.gradient(points, idx))

    def quadrature(self, resolution: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        return manifold_quadrature(self.manifold, resolution or self.default_resolution())

    def default_resolution(self) -> int:
        raise NotImplementedError

    # -- spectral calculus -------------------------------------------------------

    def field(self, coefficients, label: str = "") -> FormField:
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (self.size,):
            raise ValueError(f"field failed ({self.tag}): expected {self.size} coefficients, got {coefficients.shape}")
        return FormField(self, coefficients, label=label)

    def zero_modes(self) -> np.ndarray:
        return np.flatnonzero(self.eigenvalues <= 1e-12)


class FrameBasis(SpectralBasis):
    """Affine coefficient functions times reference coframe elements; carries no spectrum.

    Used for fields on charts without a spectral oracle (the hyperbolic patch).
    """

    spectral = False

    def __init__(self, manifold: ModelManifold, degree: int):
        m = manifold.dimension
        N = form_dimension(m, degree)
        super().__init__(manifold, degree, band_limit=1, eigenvalues=np.full((m + 1) * N, np.nan))
        # entry e: function e // N (0 -> 1, a+1 -> x_a), component e % N

    @property
    def tag(self) -> str:
        return f"{self.manifold.name}_j{self.degree}_frame"

    def evaluate(self, points, idx=None) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        idx = self._indices(idx)
        func, comp = idx // self.components, idx % self.components
        ones = np.ones((len(points), 1))
        values = np.concatenate([ones, points], axis=1)[:, func]
        return values[..., None] * np.eye(self.components)[comp][None]

    def gradient(self, points, idx=None) -> np.ndarray:
        raise UnsupportedError(f"gradient failed ({self.tag}): frame fields have no covariant derivative oracle")

    def default_resolution(self) -> int:
        return 24


def apply_multiplier(basis: SpectralBasis, multiplier: Callable[[np.ndarray], np.ndarray], f,
                     label: str = "") -> FormField:
    """Psi(Delta) f on coefficients; f is a coefficient vector or a FormField."""
    if not basis.spectral:
        raise UnsupportedError(f"apply_multiplier failed ({basis.tag}): basis carries no spectrum")
    coefficients = f.coefficients if isinstance(f, FormField) else np.asarray(f, dtype=float)
    factors = np.asarray(multiplier(basis.eigenvalues), dtype=float)
    if not np.all(np.isfinite(factors)):
        raise ValueError(f"apply_multiplier failed ({basis.tag}): multiplier not finite on the spectrum")
    return basis.field(factors * coefficients, label=label)


def gram_matrix(basis: SpectralBasis, resolution: int | None = None, idx=None) -> np.ndarray:
    points, weights = basis.quadrature(resolution)
    E = basis.evaluate(points, idx)
    return np.einsum("p,pnJ,pkJ->nk", weights, E, E)


def exterior_derivative_matrix(lower: SpectralBasis, upper: SpectralBasis,
                               resolution: int | None = None) -> np.ndarray:
    """D[k, n] = <upper_k, d lower_n>, the coefficient-level exterior derivative."""
    if upper.degree != lower.degree + 1 or upper.manifold != lower.manifold:
        raise ValueError("exterior_derivative_matrix failed: bases must be consecutive degrees on one manifold")
    points, weights = lower.quadrature(resolution or max(lower.default_resolution(), upper.default_resolution()))
    return np.einsum("p,pkK,pnK->kn", weights, upper.evaluate(points), lower.d_image(points))


def commutation_defect(lower: SpectralBasis, upper: SpectralBasis, t: float = 1.0,
                       resolution: int | None = None) -> float:
    """max |D e^{-t Delta_j} - e^{-t Delta_{j+1}} D| on coefficients."""
    D = exterior_derivative_matrix(lower, upper, resolution)
    left = D * np.exp(-t * lower.eigenvalues)[None, :]
    right = np.exp(-t * upper.eigenvalues)[:, None] * D
    return float(np.max(np.abs(left - right))) if D.size else 0.0
