"""Oracle values of the evolved field and the a-priori gradient table."""

from __future__ import annotations

import numpy as np

from heatlab.errors import DegreeError, UnsupportedError
from heatlab.geometry.manifolds import ModelManifold
from heatlab.models import FormField


def spectral_value(alpha: FormField, x, T: float) -> np.ndarray:
    """e^{-T Delta} alpha (x), components in the frame at x."""
    return alpha.evolve(T).evaluate(np.atleast_2d(x))[0]


def spectral_gradient(alpha: FormField, x, T: float) -> np.ndarray:
    """nabla e^{-T Delta} alpha (x) as an (m, N) array: row a is nabla_{e_a}."""
    return alpha.evolve(T).gradient(np.atleast_2d(x))[0]


def sup_gradient_bound(M: ModelManifold, j: int, times, points, fields: list[FormField]) -> np.ndarray:
    """Ratios |nabla e^{-T Delta_j} alpha (x)| / ||alpha||_inf, shape (len(times), len(fields), len(points))."""
    if not fields:
        raise ValueError(f"sup_gradient_bound failed ({M.name}): empty field family")
    times = np.asarray(times, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    table = np.zeros((len(times), len(fields), len(points)))
    for f, alpha in enumerate(fields):
        if alpha.degree != j:
            raise DegreeError(f"sup_gradient_bound failed ({M.name}): field {alpha.label!r} has degree {alpha.degree}, expected {j}")
        if alpha.basis.manifold != M:
            raise UnsupportedError(f"sup_gradient_bound failed ({M.name}): field lives on {alpha.basis.manifold.name}")
        norm = alpha.sup_norm()
        if norm == 0:
            continue
        for i, T in enumerate(times):
            grads = alpha.evolve(T).gradient(points)
            table[i, f] = np.linalg.norm(grads.reshape(len(points), -1), axis=1) / norm
    return table
