"""Admissible processes l_k = k_k xi on the path grid."""

from __future__ import annotations

import numpy as np

from heatlab.models import ControlProcess, DevelopedPath


def _xi(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 1:
        xi = xi[:, None]
    return xi


def _from_profile(kind: str, xi: np.ndarray, profile: np.ndarray, dt: float,
                  stop_index: np.ndarray | None = None, rate_profile: np.ndarray | None = None) -> ControlProcess:
    values = profile[..., None, None] * xi
    rate_profile = profile if rate_profile is None else rate_profile
    derivatives = np.diff(rate_profile, axis=1)[..., None, None] / dt * xi
    return ControlProcess(kind=kind, xi=xi, values=values, derivatives=derivatives, stop_index=stop_index)


def control_linear(t: float, xi, n_steps: int) -> ControlProcess:
    """l_s = (1 - s/t) xi on n_steps equal steps of [0, t]."""
    if not t > 0:
        raise ValueError(f"control_linear failed (t={t}): horizon must be positive")
    s = np.linspace(0.0, t, n_steps + 1)
    profile = (1.0 - s / t)[None, :]
    return _from_profile("linear", _xi(xi), profile, t / n_steps, np.array([n_steps]))


def _clamp(path: DevelopedPath, r: float) -> np.ndarray:
    if not r > 0:
        raise ValueError(f"control_exit_adapted failed (r={r}): radius must be positive")
    running = np.maximum.accumulate(path.radial, axis=1)
    return np.clip(2.0 * (r - running) / r, 0.0, 1.0)


def exit_profile(path: DevelopedPath, t: float, r: float) -> np.ndarray:
    """k_k = (1 - s_k/t) clamp(2 (r - max_{i<=k} dist(x_i, x_0)) / r, 0, 1); zero from exit_index(r) on."""
    return (1.0 - path.times / t)[None, :] * _clamp(path, r)


def lagged_exit_profile(path: DevelopedPath, t: float, r: float) -> np.ndarray:
    """exit_profile with the running maximum taken over i < k; zero from exit_index(r) + 1 on."""
    clamp = _clamp(path, r)
    lagged = np.concatenate([np.ones((path.n_paths, 1)), clamp[:, :-1]], axis=1)
    return (1.0 - path.times / t)[None, :] * lagged


def control_exit_adapted(path: DevelopedPath, t: float, r: float, xi) -> ControlProcess:
    """Exit-adapted control; l_k vanishes from exit_index(r) on.

    The rates are forward differences of the lagged profile, so the rate at step k
    is known at step k and the Ito sum pairs it with an independent increment.
    They run to exit_index(r) + 1, where the lagged profile reaches 0.
    """
    n = path.config.n_steps
    exits = path.exit_index(r)
    stop = np.where(exits >= 0, np.minimum(exits + 1, n), n)
    return _from_profile("exit_adapted", _xi(xi), exit_profile(path, t, r), path.config.dt, stop,
                         lagged_exit_profile(path, t, r))


def moment_of_control(control: ControlProcess, dt: float) -> np.ndarray:
    """Per-path (int |k'|^2 ds)^{1/2} of the scalar profile."""
    scale = np.linalg.norm(control.xi)
    if scale == 0:
        return np.zeros(control.derivatives.shape[0])
    rates = np.linalg.norm(control.derivatives, axis=(-2, -1)) / scale
    return np.sqrt(np.sum(rates ** 2, axis=1) * dt)
