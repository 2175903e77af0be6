"""Truncated eigen-sums for heat kernels with explicit tail bounds."""

from __future__ import annotations

import numpy as np
from scipy import optimize

from heatlab import config
from heatlab.errors import TruncationError, UnsupportedError
from heatlab.models import KernelTable
from heatlab.spectral.basis import SpectralBasis

_EXPONENT_CAP = 745.0  # e^{-745} underflows


def _gap(full: np.ndarray, trunc: np.ndarray) -> float:
    """prod(full) - prod(trunc) as a sum of nonnegative telescoping terms."""
    total = 0.0
    for i in range(len(full)):
        total += (full[i] - trunc[i]) * np.prod(trunc[:i]) * np.prod(full[i + 1:])
    return float(total)


def _torus_sums(basis, t: float, power: int):
    """Per-axis (full, truncated) sums of |k|^power e^{-t k^2} over k = 2 pi n / P."""
    L = basis.band_limit
    full, trunc = [], []
    for period in basis.manifold.periods:
        top = max(L + 1, int(np.ceil(np.sqrt(_EXPONENT_CAP / t) * period / (2.0 * np.pi))) + 1)
        k = 2.0 * np.pi * np.arange(-top, top + 1) / period
        terms = np.abs(k) ** power * np.exp(-t * k ** 2)
        inside = np.abs(np.arange(-top, top + 1)) <= L
        full.append(terms.sum())
        trunc.append(terms[inside].sum())
    return np.array(full), np.array(trunc)


def _sphere_tail(basis, t: float, weight_power: float) -> float:
    rho = basis.manifold.radius
    L = basis.band_limit
    top = max(L + 2, int(np.sqrt(_EXPONENT_CAP * rho ** 2 / t)) + 2)
    l = np.arange(L + 1, top + 1)
    lam = l * (l + 1) / rho ** 2
    families = 2.0 if basis.degree == 1 else 1.0
    return float(families * np.sum(lam ** weight_power * (2 * l + 1) / (4.0 * np.pi * rho ** 2) * np.exp(-t * lam)))


def tail_bound(basis: SpectralBasis, t: float, gradient: bool = False) -> float:
    """Pointwise bound on the omitted part of the kernel (or its gradient) at time t."""
    if not t > 0:
        raise ValueError(f"tail_bound failed ({basis.tag}): t must be positive, got {t}")
    kind = basis.manifold.kind
    if kind == "flat_torus":
        vol = basis.manifold.total_volume
        f0, t0 = _torus_sums(basis, t, 0)
        zero = _gap(f0, t0) / vol
        if not gradient:
            return zero
        f2, t2 = _torus_sums(basis, t, 2)
        second = 0.0
        for i in range(len(f0)):
            full = f0.copy()
            trunc = t0.copy()
            full[i], trunc[i] = f2[i], t2[i]
            second += _gap(full, trunc)
        # Cauchy-Schwarz: sum |k| e^{-t k^2} <= sqrt(sum |k|^2 e^{-t k^2} * sum e^{-t k^2})
        return float(np.sqrt(second / vol * zero))
    if kind == "sphere2":
        return _sphere_tail(basis, t, 0.5 if gradient else 0.0)
    raise UnsupportedError(f"tail_bound failed ({basis.tag}): no spectral tail on this manifold")


def minimum_time(basis: SpectralBasis, tol: float = config.TAIL_TOLERANCE, gradient: bool = False) -> float:
    """Smallest t with tail_bound(t) <= tol."""
    def excess(log_t):
        tail = tail_bound(basis, float(np.exp(log_t)), gradient)
        return np.log(max(tail, 1e-300)) - np.log(tol)

    lo, hi = np.log(1e-8), np.log(1e4)
    if excess(lo) <= 0:
        return float(np.exp(lo))
    if excess(hi) > 0:
        return float(np.exp(hi))
    return float(np.exp(optimize.brentq(excess, lo, hi, xtol=1e-6)))


def check_truncation(basis: SpectralBasis, t: float, tol: float = config.TAIL_TOLERANCE,
                     gradient: bool = False) -> float:
    tail = tail_bound(basis, t, gradient)
    if tail > tol:
        raise TruncationError(
            f"heat kernel failed ({basis.tag}, t={t:.4g}): tail bound {tail:.3g} exceeds {tol:.3g}",
            minimum_time(basis, tol, gradient),
        )
    return tail


def heat_kernel(basis: SpectralBasis, t: float, x, y, tol: float = config.TAIL_TOLERANCE) -> np.ndarray:
    """(N, N) value of e^{-t Delta_j}(x, y): sum_n e^{-t lambda_n} e_n(x) e_n(y)^T."""
    check_truncation(basis, t, tol)
    ex = basis.evaluate(np.atleast_2d(x))[0]
    ey = basis.evaluate(np.atleast_2d(y))[0]
    return np.einsum("n,nI,nJ->IJ", np.exp(-t * basis.eigenvalues), ex, ey)


def grad_heat_kernel(basis: SpectralBasis, t: float, x, y, tol: float = config.TAIL_TOLERANCE) -> np.ndarray:
    """(m, N, N) value of nabla_x e^{-t Delta_j}(x, y)."""
    check_truncation(basis, t, tol, gradient=True)
    gx = basis.gradient(np.atleast_2d(x))[0]
    ey = basis.evaluate(np.atleast_2d(y))[0]
    return np.einsum("n,naI,nJ->aIJ", np.exp(-t * basis.eigenvalues), gx, ey)


def kernel_table(basis: SpectralBasis, times, xs, ys, tol: float = config.TAIL_TOLERANCE,
                 gradient: bool = False) -> KernelTable:
    """Kernel (or x-gradient kernel, values (T, Px, Py, m, N, N)) over a time grid and two point grids."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    tails = np.array([check_truncation(basis, t, tol, gradient) for t in times])
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    decay = np.exp(-times[:, None] * basis.eigenvalues[None, :])
    Ey = basis.evaluate(ys)
    if gradient:
        values = np.einsum("tn,pnaI,qnJ->tpqaIJ", decay, basis.gradient(xs), Ey)
    else:
        values = np.einsum("tn,pnI,qnJ->tpqIJ", decay, basis.evaluate(xs), Ey)
    return KernelTable(times=times, xs=xs, ys=ys, values=values, tails=tails)


def heat_trace(basis: SpectralBasis, t: float) -> float:
    return float(np.sum(np.exp(-t * basis.eigenvalues)))
