"""Damped parallel transports along developed paths.

Q solves dQ/ds = -1/2 Q (frame-conjugated V_j), Q(0) = 1, and Qu the same ODE
with the commutator potential on T*⊗Lambda^j. Both use a per-step
exponential-Euler update with the potential frozen at the left endpoint.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg

from heatlab.geometry.exterior import compound
from heatlab.geometry.manifolds import ModelManifold
from heatlab.geometry.weitzenboeck import weitzenboeck_field
from heatlab.models import DampedTransports, DevelopedPath


def _step_exponentials(A: np.ndarray, h: float) -> np.ndarray:
    """exp(-h/2 A) for a stack of square matrices."""
    if np.allclose(A, np.swapaxes(A, -1, -2), atol=1e-13):
        w, U = np.linalg.eigh(0.5 * (A + np.swapaxes(A, -1, -2)))
        return np.einsum("...ab,...b,...cb->...ac", U, np.exp(-0.5 * h * w), U)
    return linalg.expm(-0.5 * h * A)


def _accumulate(steps: np.ndarray) -> np.ndarray:
    P, n, d, _ = steps.shape
    out = np.empty((P, n + 1, d, d))
    out[:, 0] = np.eye(d)
    for k in range(n):
        out[:, k + 1] = out[:, k] @ steps[:, k]
    return out


def conjugate_fields(path: DevelopedPath, fields: dict, j: int) -> dict:
    """Express V, V_underline and rho in the transported frame at every step."""
    O = np.where(np.isfinite(path.frames), path.frames, np.eye(path.frames.shape[-1]))
    C = compound(O, j)
    m = O.shape[-1]
    N = C.shape[-1]
    K = np.einsum("...ia,...JA->...iJaA", O, C).reshape(O.shape[:-2] + (m * N, m * N))
    V = np.einsum("...Ia,...IJ,...Jb->...ab", C, fields["V"], C)
    Vu = np.einsum("...Ia,...IJ,...Jb->...ab", K, fields["V_underline"], K)
    rho = np.einsum("...ba,...IK,...bIJ,...JL->...aKL", O, C, fields["rho"], C)
    return {"V": V, "V_underline": Vu, "rho": rho}


def damped_transports(M: ModelManifold, path: DevelopedPath, j: int,
                      coupling: str = "implemented") -> DampedTransports:
    finite = np.all(np.isfinite(path.points), axis=-1)
    anchor = path.points[:, :1]
    safe_points = np.where(finite[..., None], path.points, anchor)
    fields = conjugate_fields(path, weitzenboeck_field(M, safe_points, j, coupling), j)
    h = path.config.dt
    n = path.config.n_steps
    # frozen after a chart exit
    live = finite[:, :n, None, None]
    N = fields["V"].shape[-1]
    mN = fields["V_underline"].shape[-1]
    steps = np.where(live, _step_exponentials(fields["V"][:, :n], h), np.eye(N))
    steps_u = np.where(live, _step_exponentials(fields["V_underline"][:, :n], h), np.eye(mN))
    norms = np.linalg.norm(fields["V"], ord=2, axis=(-2, -1))
    norms_u = np.linalg.norm(fields["V_underline"], ord=2, axis=(-2, -1))
    return DampedTransports(
        degree=j,
        Q=_accumulate(steps),
        Qu=_accumulate(steps_u),
        rho=fields["rho"],
        potential_norm=np.where(finite, norms, 0.0),
        dt=h,
        coupling=coupling,
        underline_norm=np.where(finite, norms_u, 0.0),
    )


def gronwall_ratio(transports: DampedTransports) -> float:
    """max of |Q_k|, |Q_k^{-1}|, |Qu_k|, |Qu_k^{-1}| over e^{C s_k}, C = 1/2 sup of the potential norm."""
    n = transports.Q.shape[1] - 1
    s = np.arange(n + 1) * transports.dt
    worst = 0.0
    for T, norms in ((transports.Q, transports.potential_norm),
                     (transports.Qu, transports.underline_norm)):
        C = 0.5 * float(np.max(norms))
        envelope = np.exp(C * s)
        worst = max(
            worst,
            float(np.max(np.linalg.norm(T, ord=2, axis=(-2, -1)) / envelope)),
            float(np.max(np.linalg.norm(np.linalg.inv(T), ord=2, axis=(-2, -1)) / envelope)),
        )
    return worst
