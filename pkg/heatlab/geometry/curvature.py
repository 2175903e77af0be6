"""Connection and curvature from closed-form metric data."""

from __future__ import annotations

import numpy as np

from heatlab.geometry.manifolds import ModelManifold
from heatlab.models import CurvaturePack


def christoffel(M: ModelManifold, x) -> np.ndarray:
    """Gamma[..., c, a, b] = 1/2 g^{cd} (d_a g_db + d_b g_da - d_d g_ab)."""
    g = M.metric(x)
    dg, _ = M.metric_derivatives(x)
    lowered = (np.einsum("...adb->...dab", dg) + np.einsum("...bda->...dab", dg) - dg)
    return 0.5 * np.einsum("...cd,...dab->...cab", np.linalg.inv(g), lowered)


def riemann_from_metric(M: ModelManifold, x) -> np.ndarray:
    """Coordinate R_iklm assembled from first and second metric partials."""
    g = M.metric(x)
    _, ddg = M.metric_derivatives(x)
    gamma = christoffel(M, x)
    second = 0.5 * (
        np.einsum("...klim->...iklm", ddg)
        + np.einsum("...imkl->...iklm", ddg)
        - np.einsum("...kmil->...iklm", ddg)
        - np.einsum("...ilkm->...iklm", ddg)
    )
    quadratic = (np.einsum("...np,...nkl,...pim->...iklm", g, gamma, gamma)
                 - np.einsum("...np,...nkm,...pil->...iklm", g, gamma, gamma))
    return second + quadratic


def riemann(M: ModelManifold, x) -> np.ndarray:
    """Closed form K (g_ac g_bd - g_ad g_bc) for the constant-curvature catalog."""
    g = M.metric(x)
    gg = np.einsum("...ac,...bd->...abcd", g, g)
    return M.sectional_curvature * (gg - np.einsum("...abcd->...abdc", gg))


def frame_riemann(M: ModelManifold) -> np.ndarray:
    """Riemann components in any orthonormal frame (constant on the catalog)."""
    eye = np.eye(M.dimension)
    dd = np.einsum("ac,bd->abcd", eye, eye)
    return M.sectional_curvature * (dd - np.einsum("abcd->abdc", dd))


def frame_nabla_riemann(M: ModelManifold) -> np.ndarray:
    """nabla_v R_abcd in an orthonormal frame; the catalog is locally symmetric."""
    return np.zeros((M.dimension,) * 5)


def to_frame(R: np.ndarray, E: np.ndarray) -> np.ndarray:
    return np.einsum("...ijkl,...ia,...jb,...kc,...ld->...abcd", R, E, E, E, E)


def ricci_from_riemann(R: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    return np.einsum("...ac,...abcd->...bd", ginv, R)


def curvature_at(M: ModelManifold, x) -> CurvaturePack:
    x = M.check_domain(np.asarray(x, dtype=float))
    g = M.metric(x)
    R = riemann(M, x)
    E = M.orthonormal_frame(x)
    R_frame = to_frame(R, E)
    return CurvaturePack(
        christoffel=christoffel(M, x),
        riemann=R,
        ricci=ricci_from_riemann(R, np.linalg.inv(g)),
        riem_norm=float(np.linalg.norm(R_frame)),
        nabla_riem_norm=float(np.linalg.norm(frame_nabla_riemann(M))),
        frame=E,
        riemann_frame=R_frame,
    )


def symmetry_residual(R: np.ndarray) -> float:
    """Largest violation of the algebraic Riemann symmetries (incl. first Bianchi)."""
    checks = [
        R + np.einsum("...abcd->...bacd", R),
        R + np.einsum("...abcd->...abdc", R),
        R - np.einsum("...abcd->...cdab", R),
        R + np.einsum("...abcd->...bcad", R) + np.einsum("...abcd->...cabd", R),
    ]
    return float(max(np.max(np.abs(c)) for c in checks))
