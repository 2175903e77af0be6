"""Weitzenböck potentials V_j, the commutator potential V_j underline and rho_j."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from heatlab.geometry.curvature import frame_nabla_riemann, frame_riemann
from heatlab.geometry.exterior import (
    derivation,
    form_dimension,
    interior_matrices,
    wedge_matrices,
)
from heatlab.geometry.manifolds import ModelManifold
from heatlab.models import WeitzenboeckData

COUPLINGS = ("implemented", "literal")


def curvature_actions(R: np.ndarray) -> np.ndarray:
    """A[..., a, b] = action of R(e_a, e_b) on covectors, as (m, m) matrices."""
    return -np.einsum("...qpab->...abpq", R)


def potential_from_riemann(R: np.ndarray, j: int) -> np.ndarray:
    """V_j = -sum_{a,b} e^a ∧ i_b R(e_a, e_b) on Lambda^j (linear in R)."""
    m = R.shape[-1]
    N = form_dimension(m, j)
    if j == 0:
        return np.zeros(R.shape[:-4] + (N, N))
    D = derivation(curvature_actions(R), j)  # (..., m, m, N, N)
    ops = np.einsum("akl,blq->abkq", wedge_matrices(m, j - 1), interior_matrices(m, j))
    return -np.einsum("abkl,...ablq->...kq", ops, D)


def ricci_frame(R: np.ndarray) -> np.ndarray:
    return np.einsum("...abad->...bd", R)


def underline_potential(R: np.ndarray, j: int, coupling: str = "implemented") -> np.ndarray:
    """Potential on T*⊗Lambda^j, row-major (i, J) components.

    implemented: (Vphi)_i = Ric_ik phi_k + V_j phi_i - 2 sum_k R(e_i, e_k) phi_k
    literal:     (Vphi)_i = Ric_ik phi_k + V_j phi_i - 2 sum_k R(e_i, e_k) phi_i
    """
    if coupling not in COUPLINGS:
        raise ValueError(f"unknown coupling {coupling!r}")
    m = R.shape[-1]
    N = form_dimension(m, j)
    lead = R.shape[:-4]
    ric = ricci_frame(R)
    V = potential_from_riemann(R, j)
    base = (np.einsum("...ik,JK->...iJkK", ric, np.eye(N))
            + np.einsum("ik,...JK->...iJkK", np.eye(m), V))
    D = derivation(curvature_actions(R), j)  # (..., i, k, N, N)
    if coupling == "implemented":
        coupling_term = np.einsum("...ikJK->...iJkK", D)
    else:
        coupling_term = np.einsum("ik,...iJK->...iJkK", np.eye(m), D.sum(axis=-3))
    return (base - 2.0 * coupling_term).reshape(lead + (m * N, m * N))


def rho_from_nabla_riemann(nabla_R: np.ndarray, j: int) -> np.ndarray:
    """rho[v] = V_j(nabla_v R) + sum_i D_j(nabla_{e_i} R (e_i, v)), shape (..., m, N, N)."""
    first = potential_from_riemann(nabla_R, j)
    actions = curvature_actions(nabla_R)  # (..., i, a, b, m, m)
    contracted = np.einsum("...iivpq->...vpq", actions)
    return first + derivation(contracted, j)


@lru_cache(maxsize=None)
def potential_constant(m: int, j: int) -> float:
    """C(m, j) with |V_j| <= C |Riem| (Frobenius norm of the linear map Riem -> V_j)."""
    basis = np.eye(m ** 4).reshape((m ** 4,) + (m,) * 4)
    images = potential_from_riemann(basis, j)
    return float(np.sqrt(np.sum(images ** 2)))


def weitzenboeck_field(M: ModelManifold, points, j: int, coupling: str = "implemented") -> dict:
    """V, V_underline, rho at a stack of chart points (reference orthonormal frame)."""
    points = np.asarray(points, dtype=float)
    form_dimension(M.dimension, j)
    lead = points.shape[:-1]
    R = frame_riemann(M)
    V = potential_from_riemann(R, j)
    Vu = underline_potential(R, j, coupling)
    rho = rho_from_nabla_riemann(frame_nabla_riemann(M), j)
    return {
        "V": np.broadcast_to(V, lead + V.shape),
        "V_underline": np.broadcast_to(Vu, lead + Vu.shape),
        "rho": np.broadcast_to(rho, lead + rho.shape),
    }


def weitzenboeck_at(M: ModelManifold, x, j: int, coupling: str = "implemented") -> WeitzenboeckData:
    x = M.check_domain(np.asarray(x, dtype=float))
    fields = weitzenboeck_field(M, x, j, coupling)
    V = np.array(fields["V"])
    return WeitzenboeckData(
        degree=j,
        V=V,
        V_underline=np.array(fields["V_underline"]),
        rho=np.array(fields["rho"]),
        lower_bound=float(np.min(np.linalg.eigvalsh(V))) if V.size else 0.0,
        coupling=coupling,
    )


def potential_sup(M: ModelManifold, j: int) -> float:
    """sup |V_j| (spectral norm) over M; constant on the catalog."""
    V = potential_from_riemann(frame_riemann(M), j)
    return float(np.linalg.norm(V, 2)) if V.size else 0.0
