"""Exception hierarchy."""


class HeatlabError(Exception):
    """Base class for every error raised by heatlab."""


class DomainError(HeatlabError, ValueError):
    """A point lies outside the chart domain of a model manifold."""


class DegreeError(HeatlabError, ValueError):
    """Form degree outside [0, m]."""


class UnsupportedError(HeatlabError, RuntimeError):
    """Operation has no implementation (or no oracle) for this manifold/degree."""


class TruncationError(HeatlabError, RuntimeError):
    """Spectral tail bound exceeds tolerance at the requested time."""

    def __init__(self, message: str, min_time: float):
        super().__init__(f"{message} (minimum admissible t ≈ {min_time:.4g})")
        self.min_time = min_time


class PreconditionError(HeatlabError, ValueError):
    """A verification or decomposition regime was requested outside its hypotheses."""


class MeshError(HeatlabError, ValueError):
    """Mesh is non-manifold, non-orientable, open, or not Delaunay."""


class InstanceError(HeatlabError, ValueError):
    """Finite metric measure space fails validation."""


class ConfigError(HeatlabError, ValueError):
    """Run configuration failed to parse or validate."""


class ParameterError(HeatlabError, ValueError):
    """A suite rejected a parameter value while running."""
