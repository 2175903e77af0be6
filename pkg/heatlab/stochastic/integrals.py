"""The two summands of the Bismut functional U, as Lambda^j components per path."""

from __future__ import annotations

import numpy as np

from heatlab.models import ControlProcess, DampedTransports, DevelopedPath


def bismut_integrals(path: DevelopedPath, transports: DampedTransports,
                     control: ControlProcess, j: int) -> tuple[np.ndarray, np.ndarray]:
    """(stochastic, drift), each (P, N).

    stochastic = sum_k Q_k^{-T} (Qu_k^T l'_k)[dW_k]   (left endpoint, Ito)
    drift      = 1/2 dt sum_k Q_k^{-T} sum_i rho_k[i]^T (Qu_k^T l_k)[i]
    Terms with k >= stop_index are dropped.
    """
    n = path.config.n_steps
    if control.derivatives.shape[1] != n:
        raise ValueError(
            f"bismut_integrals failed (degree {j}): control has {control.derivatives.shape[1]} steps, path has {n}"
        )
    P = path.n_paths
    m, N = control.xi.shape
    Qinv_t = np.swapaxes(np.linalg.inv(transports.Q[:, :n]), -1, -2)
    Qu_t = np.swapaxes(transports.Qu[:, :n], -1, -2)

    rates = np.broadcast_to(control.derivatives, (P, n, m, N)).reshape(P, n, m * N)
    psi = np.einsum("pkab,pkb->pka", Qu_t, rates).reshape(P, n, m, N)
    stochastic = np.einsum("pkIJ,pkJ->pkI", Qinv_t, np.einsum("pkiJ,pki->pkJ", psi, path.increments))

    values = np.broadcast_to(control.values[:, :n], (P, n, m, N)).reshape(P, n, m * N)
    phi = np.einsum("pkab,pkb->pka", Qu_t, values).reshape(P, n, m, N)
    rho = transports.rho[:, :n]
    drift = 0.5 * path.config.dt * np.einsum(
        "pkIJ,pkJ->pkI", Qinv_t, np.einsum("pkiJI,pkiJ->pkI", rho, phi)
    )

    stop = control.stop_index if control.stop_index is not None else np.array([n])
    keep = (np.arange(n)[None, :] < np.broadcast_to(stop, (P,))[:, None])[..., None]
    return (np.sum(np.where(keep, stochastic, 0.0), axis=1),
            np.sum(np.where(keep, drift, 0.0), axis=1))
