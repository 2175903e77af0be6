"""heatlab: path estimators, spectral oracles and bound verification for heat semigroups on differential forms."""

__version__ = "0.1.0"
