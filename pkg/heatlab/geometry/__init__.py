"""Closed-form differential geometry of the model catalog."""

from heatlab.geometry.curvature import curvature_at
from heatlab.geometry.manifolds import (
    ModelManifold,
    flat_torus,
    geodesic_distance,
    hyperbolic_patch,
    manifold_from_spec,
    sphere2,
)
from heatlab.geometry.volume import ball_volume
from heatlab.geometry.weitzenboeck import weitzenboeck_at

__all__ = [
    "ModelManifold",
    "ball_volume",
    "curvature_at",
    "flat_torus",
    "geodesic_distance",
    "hyperbolic_patch",
    "manifold_from_spec",
    "sphere2",
    "weitzenboeck_at",
]
