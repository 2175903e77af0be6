"""Monte-Carlo Feynman-Kac and Bismut estimators with their oracle counterparts."""

from heatlab.estimators.bismut import bismut_global, bismut_local, exit_probability
from heatlab.estimators.feynman_kac import feynman_kac, scalar_feynman_kac
from heatlab.estimators.fields import bump_field, build_field, random_band_limited_field
from heatlab.estimators.gradient_bounds import spectral_gradient, spectral_value, sup_gradient_bound

__all__ = [
    "bismut_global",
    "bismut_local",
    "build_field",
    "bump_field",
    "exit_probability",
    "feynman_kac",
    "random_band_limited_field",
    "scalar_feynman_kac",
    "spectral_gradient",
    "spectral_value",
    "sup_gradient_bound",
]
