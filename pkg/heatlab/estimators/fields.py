"""Builders for the test sections fed to estimators and suites."""

from __future__ import annotations

import numpy as np

from heatlab.errors import ConfigError
from heatlab.models import FormField
from heatlab.spectral.basis import SpectralBasis


def random_band_limited_field(basis: SpectralBasis, rng: np.random.Generator, band: float | None = None,
                              decay: float = 0.0, label: str = "random") -> FormField:
    """Gaussian coefficients on entries with eigenvalue <= band, unit L^2 norm."""
    lam = basis.eigenvalues
    keep = np.ones(basis.size, dtype=bool) if band is None else lam <= band
    coefficients = np.where(keep, rng.standard_normal(basis.size), 0.0)
    if decay:
        coefficients *= np.exp(-decay * np.nan_to_num(lam))
    norm = np.linalg.norm(coefficients)
    if norm == 0:
        raise ValueError(f"random_band_limited_field failed ({basis.tag}): no entries below band {band}")
    return basis.field(coefficients / norm, label=label)


def bump_field(basis: SpectralBasis, x, s: float, component: int = 0) -> FormField:
    """Heat-smoothed delta at x: coefficients e^{-s lambda_n} e_n(x)[component]."""
    values = basis.evaluate(np.atleast_2d(x))[0, :, component]
    return basis.field(np.exp(-s * basis.eigenvalues) * values, label=f"bump_s{s:g}")


def eigen_field(basis: SpectralBasis, index: int, scale: float = 1.0) -> FormField:
    coefficients = np.zeros(basis.size)
    coefficients[index] = scale
    return basis.field(coefficients, label=f"eigen{index}")


def parallel_field(basis: SpectralBasis, components=None) -> FormField:
    """A zero-mode combination; on a torus these are the parallel forms."""
    zero = basis.zero_modes()
    if not len(zero):
        raise ValueError(f"parallel_field failed ({basis.tag}): the basis has no zero modes")
    weights = np.ones(len(zero)) if components is None else np.asarray(components, dtype=float)
    coefficients = np.zeros(basis.size)
    coefficients[zero] = weights[: len(zero)]
    return basis.field(coefficients, label="parallel")


def first_entry_above(basis: SpectralBasis, level: float = 0.0) -> int:
    """Lowest entry with eigenvalue strictly above level."""
    hits = np.flatnonzero(basis.eigenvalues > level + 1e-12)
    if not len(hits):
        raise ValueError(f"first_entry_above failed ({basis.tag}): spectrum ends below {level}")
    return int(hits[0])


def build_field(spec: dict, basis: SpectralBasis, rng: np.random.Generator) -> FormField:
    """Field from a config mapping: kind in {random, eigen, bump, parallel, coefficients}."""
    spec = dict(spec)
    kind = spec.pop("kind", "random")
    try:
        if kind == "random":
            return random_band_limited_field(basis, rng, spec.get("band"), spec.get("decay", 0.0))
        if kind == "eigen":
            index = spec["index"] if "index" in spec else first_entry_above(basis, spec.get("above", 0.0))
            return eigen_field(basis, int(index), spec.get("scale", 1.0))
        if kind == "bump":
            return bump_field(basis, spec["x"], float(spec.get("s", 0.05)), int(spec.get("component", 0)))
        if kind == "parallel":
            return parallel_field(basis, spec.get("components"))
        if kind == "coefficients":
            coefficients = np.zeros(basis.size)
            for index, value in spec["values"].items():
                coefficients[int(index)] = float(value)
            return basis.field(coefficients, label="coefficients")
    except KeyError as exc:
        raise ConfigError(f"build_field failed ({kind}): missing key {exc}") from None
    raise ConfigError(f"build_field failed: unknown field kind {kind!r}")
