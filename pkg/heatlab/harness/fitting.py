"""Constant fitting, Gaussian rates, refinement drift and report assembly."""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy import optimize, special

from heatlab import config
from heatlab.models import BoundSpec, FitReport


def lambert_constant(q: float, rate: float) -> float:
    """Smallest C >= 0 with C e^{C rate} >= q."""
    if not q > 0:
        return 0.0
    if rate <= 0:
        return float(q)
    return float(np.real(special.lambertw(q * rate)) / rate)


def fit_exponential_constant(data, shape, tau, floor: float = 0.0) -> float:
    """Smallest C with data <= C e^{C tau} shape at every grid point."""
    data, shape, tau = np.broadcast_arrays(np.asarray(data, float), np.asarray(shape, float), np.asarray(tau, float))
    best = floor
    for d, s, t in zip(data.ravel(), shape.ravel(), tau.ravel()):
        if d > 0 and np.isfinite(d):
            best = max(best, lambert_constant(d / s, t))
    return float(best)


def bisect_constant(margin: Callable[[float], float], lo: float = 1e-6, hi: float = 1e6) -> float:
    """Smallest C with margin(C) >= 0 for a margin increasing in C."""
    if margin(lo) >= 0:
        return lo
    while margin(hi) < 0:
        hi *= 10.0
        if hi > 1e300:
            return np.inf
    return float(optimize.brentq(margin, lo, hi, xtol=1e-12, rtol=1e-10))


def gaussian_rate(t, rho, data, diagonal, floor: float = config.NUMERICAL_FLOOR, reach: float = 1.0) -> float:
    """Largest D with data <= diagonal e^{-D rho^2 / t} over pairs with rho >= reach * sqrt(t).

    Pairs whose data sit below floor * diagonal carry no rate information and are dropped.
    """
    t, rho, data, diagonal = (np.asarray(a, dtype=float) for a in np.broadcast_arrays(t, rho, data, diagonal))
    use = (rho >= reach * np.sqrt(t)) & (data > floor * diagonal) & (diagonal > 0)
    if not use.any():
        return np.inf
    rates = t[use] * (np.log(diagonal[use]) - np.log(data[use])) / rho[use] ** 2
    return float(max(rates.min(), 0.0))


def fit_gaussian(t, rho, data, volume, diagonal=None, D: float | None = None, scale: float = 1.0,
                 reach: float = 1.0) -> dict[str, float]:
    """Fit data <= C / V e^{C t} e^{-D rho^2 / t}; D defaults to scale * the measured rate."""
    if D is None:
        rate = gaussian_rate(t, rho, data, diagonal, reach=reach)
        D = scale * (rate if np.isfinite(rate) else 1.0)
    t, rho, data, volume = (np.asarray(a, dtype=float) for a in np.broadcast_arrays(t, rho, data, volume))
    shape = np.exp(-D * rho ** 2 / t) / volume
    C = fit_exponential_constant(data, shape, t)
    return {"C": C, "D": float(D)}


def gaussian_ratio(t, rho, data, volume, C: float, D: float) -> float:
    t, rho, data, volume = (np.asarray(a, dtype=float) for a in np.broadcast_arrays(t, rho, data, volume))
    bound = C / volume * np.exp(C * t - D * rho ** 2 / t)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound > 0, data / bound, np.where(data > 0, np.inf, 0.0))
    return float(np.max(ratio)) if ratio.size else 0.0


def d_scan(t, rho, data, volume, D_max: float, points: int = 9) -> tuple[np.ndarray, bool]:
    """(D, C(D)) pairs for D in (0, D_max]; C must be nondecreasing in D."""
    Ds = np.linspace(D_max / points, D_max, points)
    Cs = np.array([fit_gaussian(t, rho, data, volume, D=D)["C"] for D in Ds])
    monotone = bool(np.all(np.diff(Cs) >= -1e-9 * np.maximum(Cs[1:], 1.0)))
    return np.column_stack([Ds, Cs]), monotone


def relative_drift(coarse: dict[str, float], fine: dict[str, float]) -> float:
    """max relative change of the shared constants."""
    worst = 0.0
    for key in coarse.keys() & fine.keys():
        a, b = float(coarse[key]), float(fine[key])
        if not (np.isfinite(a) and np.isfinite(b)):
            return np.inf
        scale = max(abs(a), abs(b))
        if scale > 0:
            worst = max(worst, abs(a - b) / scale)
    return float(worst)


def make_report(spec: BoundSpec, constants: dict[str, float], max_ratio: float, drift: float,
                manifold: str = "", threshold: float = config.DRIFT_THRESHOLD, details: dict | None = None,
                series: dict[str, np.ndarray] | None = None, rows: list[dict] | None = None,
                conditions: dict[str, bool] | None = None) -> FitReport:
    """Pass iff every constant is finite, max_ratio <= 1, drift < threshold and every named condition holds."""
    finite = all(np.isfinite(v) for v in constants.values())
    conditions = {k: bool(v) for k, v in (conditions or {}).items()}
    passed = bool(finite and max_ratio <= 1.0 + config.RATIO_SLACK and drift < threshold and all(conditions.values()))
    details = dict(details or {})
    if conditions:
        details["conditions"] = conditions
    return FitReport(
        name=spec.name,
        spec=spec,
        constants={k: float(v) for k, v in constants.items()},
        max_ratio=float(max_ratio),
        drift=float(drift),
        threshold=float(threshold),
        passed=passed,
        manifold=manifold,
        details=details or {},
        series=series or {},
        rows=rows or [],
    )
