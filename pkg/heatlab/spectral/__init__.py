"""Spectral oracles: eigen-expansions on tori and spheres, DEC meshes, multipliers."""

from heatlab import config
from heatlab.geometry.manifolds import ModelManifold
from heatlab.spectral.basis import FrameBasis, SpectralBasis, apply_multiplier, gram_matrix
from heatlab.spectral.dec import MeshComplex, dec_laplacian
from heatlab.spectral.kernels import grad_heat_kernel, heat_kernel
from heatlab.spectral.riesz import riesz_apply
from heatlab.spectral.sphere import SphereBasis, sphere_basis
from heatlab.spectral.torus import TorusBasis, torus_basis


def basis_for(M: ModelManifold, degree: int, band_limit: int | None = None) -> SpectralBasis:
    """Spectral basis of the right family for a catalog manifold (frame basis without an oracle)."""
    if M.kind == "flat_torus":
        return TorusBasis(M, band_limit or config.DEFAULT_TORUS_BAND, degree)
    if M.kind == "sphere2":
        return SphereBasis(M, band_limit or config.DEFAULT_SPHERE_BAND, degree)
    return FrameBasis(M, degree)


__all__ = [
    "FrameBasis",
    "MeshComplex",
    "SpectralBasis",
    "SphereBasis",
    "TorusBasis",
    "apply_multiplier",
    "basis_for",
    "dec_laplacian",
    "grad_heat_kernel",
    "gram_matrix",
    "heat_kernel",
    "riesz_apply",
    "sphere_basis",
    "torus_basis",
]
