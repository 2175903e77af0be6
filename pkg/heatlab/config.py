"""heatlab constants and configuration."""

import os
from pathlib import Path

# Paths (relative to project root, overridable via env)
PROJECT_ROOT = Path(os.environ.get(
    "HEATLAB_ROOT", Path(__file__).resolve().parent.parent
))
DEFAULT_OUTPUT_DIR = Path(os.environ.get(
    "HEATLAB_OUTPUT_DIR", PROJECT_ROOT / "reports"
))
CONFIG_DIR = PROJECT_ROOT / "configs"
TEMPLATE_DIR = Path(__file__).resolve().parent / "templates"

# Monte-Carlo
DEFAULT_WORKERS = int(os.environ.get("HEATLAB_WORKERS", "1"))
CHUNK_PATHS = int(os.environ.get("HEATLAB_CHUNK_PATHS", "2048"))  # fixed, never derived from workers
DEFAULT_N_STEPS = int(os.environ.get("HEATLAB_N_STEPS", "100"))
DEFAULT_SCHEME = "geodesic_step"  # "geodesic_step" | "euler_heun"
REJECTION_FLAG_RATE = 0.01  # flag estimates above this fraction of rejected paths
ORTHO_TOL = float(os.environ.get("HEATLAB_ORTHO_TOL", "1e-6"))

# Verification
SIGMA_MULTIPLE = float(os.environ.get("HEATLAB_SIGMA", "3.0"))
DRIFT_THRESHOLD = float(os.environ.get("HEATLAB_DRIFT", "0.10"))
TAIL_TOLERANCE = float(os.environ.get("HEATLAB_TAIL_TOL", "1e-10"))
NUMERICAL_FLOOR = 1e-11  # relative to the on-diagonal level
RATIO_SLACK = 1e-9

# Spectral
SPHERE_MAX_BAND = 60
DEFAULT_SPHERE_BAND = 24
DEFAULT_TORUS_BAND = 16
SUITE_SPHERE_BAND = int(os.environ.get("HEATLAB_SUITE_SPHERE_BAND", "16"))  # operator suites
SUITE_TORUS_BAND = int(os.environ.get("HEATLAB_SUITE_TORUS_BAND", "8"))

# Model catalog defaults
DEFAULT_PERIOD = 6.283185307179586
HYPERBOLIC_BOUND = 0.9  # Poincare-disk coordinate radius

# Covering / CZ
MAXIMAL_RADIUS_CAP = 8.0
HOST_RADIUS = 1.0
CZ_PRECONDITION_C = 1.0  # calibrated per instance family by calibrate_precondition
TRIANGLE_EXHAUSTIVE_MAX = 500
TRIANGLE_SAMPLES = 200_000
