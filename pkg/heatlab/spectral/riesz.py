"""Riesz transforms D (Delta_j + kappa)^{-1/2} and quadrature L^p norms of form fields."""

from __future__ import annotations

import numpy as np

from heatlab.models import FormField
from heatlab.spectral.basis import SpectralBasis, apply_multiplier

VARIANTS = ("nabla", "d", "ddagger", "d_plus_ddagger")


def resolvent_root(basis: SpectralBasis, kappa: float, f) -> FormField:
    """(Delta_j + kappa)^{-1/2} f."""
    if not kappa > 0:
        raise ValueError(f"riesz_apply failed ({basis.tag}): kappa must be positive, got {kappa}")
    return apply_multiplier(basis, lambda lam: 1.0 / np.sqrt(lam + kappa), f)


def riesz_apply(basis: SpectralBasis, j: int, kappa: float, variant: str, f) -> FormField:
    """First-order operator `variant` applied after (Delta_j + kappa)^{-1/2}."""
    if variant not in VARIANTS:
        raise ValueError(f"riesz_apply failed: unknown variant {variant!r} (expected one of {VARIANTS})")
    if j != basis.degree:
        raise ValueError(f"riesz_apply failed ({basis.tag}): degree {j} does not match the basis")
    smoothed = resolvent_root(basis, kappa, f)
    return FormField(basis, smoothed.coefficients, label=f"{variant}_riesz_k{kappa:g}", derivative=variant)


def pointwise_norm(field: FormField, points) -> np.ndarray:
    values = field.evaluate(points)
    return np.linalg.norm(values.reshape(len(values), -1), axis=1)


def lp_norm(field: FormField, p: float, resolution: int | None = None) -> float:
    points, weights = field.basis.quadrature(resolution)
    mags = pointwise_norm(field, points)
    if np.isinf(p):
        return float(mags.max())
    return float(np.sum(weights * mags ** p) ** (1.0 / p))


def level_set_measure(field: FormField, level: float, resolution: int | None = None) -> float:
    """mu{|field| > level} on the quadrature grid."""
    points, weights = field.basis.quadrature(resolution)
    return float(np.sum(weights[pointwise_norm(field, points) > level]))
