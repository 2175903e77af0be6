"""Data models shared across heatlab subpackages."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from heatlab.errors import UnsupportedError


@dataclass
class CurvaturePack:
    """Connection and curvature at one chart point (coordinate components)."""
    christoffel: np.ndarray  # [c, a, b] = Gamma^c_ab
    riemann: np.ndarray  # R_abcd, R_1212 = K det g on a surface
    ricci: np.ndarray
    riem_norm: float
    nabla_riem_norm: float
    frame: np.ndarray  # columns = orthonormal frame in coordinates
    riemann_frame: np.ndarray  # R_abcd in the orthonormal frame


@dataclass
class WeitzenboeckData:
    """Curvature endomorphisms of one degree, in the orthonormal (co)frame."""
    degree: int
    V: np.ndarray  # binom(m,j) square
    V_underline: np.ndarray  # m*binom(m,j) square, row-major (i, J)
    rho: np.ndarray  # (m, N, N): rho(alpha)(e_i) = rho[i] @ alpha
    lower_bound: float
    coupling: str = "implemented"  # "implemented" | "literal"


@dataclass
class PathConfig:
    """Simulation grid for one batch of developed paths."""
    horizon: float
    n_steps: int
    master_seed: int
    scheme: str = "geodesic_step"  # "geodesic_step" | "euler_heun"

    def __post_init__(self):
        if not self.horizon > 0 or self.n_steps < 1:
            raise ValueError(
                f"PathConfig failed (horizon={self.horizon}, n_steps={self.n_steps}): "
                "step size must be positive"
            )
        if self.scheme not in ("geodesic_step", "euler_heun"):
            raise ValueError(f"PathConfig failed: unknown scheme {self.scheme!r}")

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


@dataclass
class DevelopedPath:
    """A batch of developed Brownian paths, leading axis = path."""
    config: PathConfig
    path_indices: np.ndarray  # (P,)
    points: np.ndarray  # (P, n+1, m) chart points, NaN after a chart exit
    frames: np.ndarray  # (P, n+1, m, m) frame relative to the reference frame (orthogonal)
    increments: np.ndarray  # (P, n, m) anti-development increments
    radial: np.ndarray  # (P, n+1) distance to x0, +inf after a chart exit
    boundary_index: np.ndarray  # (P,) first truncated index, -1 if none
    embedded: np.ndarray | None = None  # ambient picture when the stepper uses one

    @property
    def times(self) -> np.ndarray:
        return self.config.times

    @property
    def n_paths(self) -> int:
        return self.points.shape[0]

    def exit_index(self, r: float) -> np.ndarray:
        """First k with dist(x_k, x_0) >= r, -1 when the path stays inside."""
        hit = self.radial >= r
        first = np.argmax(hit, axis=1)
        return np.where(hit.any(axis=1), first, -1)


@dataclass
class DampedTransports:
    """Damped parallel transports Q (Lambda^j) and Qu (T*⊗Lambda^j) along a path batch."""
    degree: int
    Q: np.ndarray  # (P, n+1, N, N)
    Qu: np.ndarray  # (P, n+1, mN, mN)
    rho: np.ndarray  # (P, n+1, m, N, N) frame-conjugated rho_j
    potential_norm: np.ndarray  # (P, n+1) spectral norm of V_j at x_k
    dt: float
    coupling: str = "implemented"
    underline_norm: np.ndarray | None = None  # (P, n+1) spectral norm of the T*⊗Lambda^j potential

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.Q)

    def inverse_transpose(self) -> np.ndarray:
        return np.swapaxes(np.linalg.inv(self.Q), -1, -2)

    def underline_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.Qu)


@dataclass
class ControlProcess:
    """Admissible process l_k = k_k * xi on the path grid."""
    kind: str  # "linear" | "exit_adapted"
    xi: np.ndarray  # (m, N)
    values: np.ndarray  # (P or 1, n+1, m, N)
    derivatives: np.ndarray  # (P or 1, n, m, N) rates, measurable at their step
    stop_index: np.ndarray | None = None  # (P,) the path integrals run over k < stop_index


@dataclass
class MCEstimate:
    """Monte-Carlo mean with componentwise standard errors."""
    value: np.ndarray
    std_error: np.ndarray
    n_paths: int
    seed: int
    rejected: int = 0
    flagged: bool = False

    @property
    def vector_error(self) -> float:
        return float(np.linalg.norm(np.atleast_1d(self.std_error)))

    def z_scores(self, reference, other: MCEstimate | None = None) -> np.ndarray:
        """|estimate - reference| in units of the (combined) standard error."""
        err = np.asarray(self.std_error, dtype=float) ** 2
        if other is not None:
            err = err + np.asarray(other.std_error, dtype=float) ** 2
        err = np.sqrt(err)
        diff = np.abs(np.asarray(self.value) - np.asarray(reference))
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(err > 0, diff / np.where(err > 0, err, 1.0), np.where(diff > 1e-12, np.inf, 0.0))
        return np.atleast_1d(z)

    def to_record(self) -> dict:
        return {
            "value": np.atleast_1d(self.value).tolist(),
            "std_error": np.atleast_1d(self.std_error).tolist(),
            "n_paths": self.n_paths,
            "seed": self.seed,
            "rejected": self.rejected,
            "flagged": self.flagged,
        }


@dataclass
class FormField:
    """A j-form section given by coefficients on a spectral basis."""
    basis: Any
    coefficients: np.ndarray
    label: str = ""
    derivative: str | None = None  # None | "nabla" | "d" | "ddagger" | "d_plus_ddagger"
    _sup_norm: float | None = field(default=None, repr=False, compare=False)

    @property
    def degree(self) -> int:
        return self.basis.degree

    @property
    def band_limit(self) -> int | None:
        return self.basis.band_limit

    @property
    def active(self) -> np.ndarray:
        return np.flatnonzero(self.coefficients)

    def _combine(self, values: np.ndarray, idx: np.ndarray) -> np.ndarray:
        return np.tensordot(self.coefficients[idx], values, axes=([0], [1]))

    def evaluate(self, points) -> np.ndarray:
        """Components at chart points: (P, N) for the section, derived shapes otherwise."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        idx = self.active
        if self.derivative is None:
            return self._combine(self.basis.evaluate(points, idx), idx)
        if self.derivative == "nabla":
            return self._combine(self.basis.gradient(points, idx), idx)
        if self.derivative == "d":
            return self._combine(self.basis.d_image(points, idx), idx)
        if self.derivative == "ddagger":
            return self._combine(self.basis.codifferential_image(points, idx), idx)
        if self.derivative == "d_plus_ddagger":
            parts = [self._combine(self.basis.d_image(points, idx), idx)]
            if self.degree > 0:
                parts.append(self._combine(self.basis.codifferential_image(points, idx), idx))
            return np.concatenate(parts, axis=-1)
        raise ValueError(f"unknown derivative {self.derivative!r}")

    def gradient(self, points) -> np.ndarray:
        """Covariant derivative components (P, m, N) in the orthonormal frame."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        idx = self.active
        return self._combine(self.basis.gradient(points, idx), idx)

    def with_coefficients(self, coefficients: np.ndarray, label: str | None = None) -> FormField:
        return FormField(self.basis, np.asarray(coefficients, dtype=float),
                         label=self.label if label is None else label, derivative=self.derivative)

    def evolve(self, T: float) -> FormField:
        """Heat-evolved field e^{-T Delta} alpha."""
        if not getattr(self.basis, "spectral", True):
            raise UnsupportedError(f"evolve failed ({self.basis.tag}): basis carries no spectrum")
        return self.with_coefficients(self.coefficients * np.exp(-T * self.basis.eigenvalues))

    def evaluate_evolved(self, points, times) -> np.ndarray:
        """e^{-tau_p Delta} alpha at points[p] with a separate time per point."""
        if not getattr(self.basis, "spectral", True):
            raise UnsupportedError(f"evaluate_evolved failed ({self.basis.tag}): basis carries no spectrum")
        points = np.atleast_2d(np.asarray(points, dtype=float))
        idx = self.active
        weights = self.coefficients[idx][None, :] * np.exp(
            -np.asarray(times, dtype=float)[:, None] * self.basis.eigenvalues[idx][None, :]
        )
        return np.einsum("pnJ,pn->pJ", self.basis.evaluate(points, idx), weights)

    def sup_norm(self) -> float:
        """max |alpha| over the basis quadrature grid (cached)."""
        if self._sup_norm is None:
            points, _ = self.basis.quadrature()
            values = self.evaluate(points)
            self._sup_norm = float(np.max(np.linalg.norm(values.reshape(len(points), -1), axis=1)))
        return self._sup_norm


@dataclass
class KernelTable:
    """Sampled heat-kernel values over a time grid and two point grids."""
    times: np.ndarray  # (T,)
    xs: np.ndarray  # (Px, m)
    ys: np.ndarray  # (Py, m)
    values: np.ndarray  # (T, Px, Py, N, N)
    tails: np.ndarray  # (T,) truncation tail bounds

    def symmetry_defect(self) -> float:
        """max |k_t(x,y) - k_t(y,x)^T| when xs and ys coincide."""
        return float(np.max(np.abs(self.values - np.swapaxes(np.swapaxes(self.values, 1, 2), -1, -2))))


@dataclass
class BoundSpec:
    """One verified inequality: name, functional form and the free constants."""
    name: str
    form: str  # human-readable right-hand side
    constants: tuple[str, ...] = ("C",)
    grid: dict = field(default_factory=dict)


@dataclass
class FitReport:
    """Outcome of fitting and checking one bound on its grid."""
    name: str
    spec: BoundSpec
    constants: dict[str, float]
    max_ratio: float
    drift: float
    threshold: float
    passed: bool
    manifold: str = ""
    details: dict = field(default_factory=dict)
    series: dict[str, np.ndarray] = field(default_factory=dict)  # name -> (k, 2)
    rows: list[dict] = field(default_factory=list)
    note: str = (
        "Verification exhibits finite constants for which the inequality holds on the sampled grid "
        "and checks their stability under grid refinement; it is evidence, not a proof."
    )


@dataclass
class CZResult:
    """Localized Calderon-Zygmund decomposition u = g + sum b_i."""
    lam: float
    good: np.ndarray  # (n,)
    balls: list[tuple[int, float]]  # (center index, radius)
    bad: list[np.ndarray]  # each (n,), supported in its ball
    omega: np.ndarray  # indices where the maximal function exceeds lam
    complement: np.ndarray
    overlap: int = 0  # max number of other balls meeting one ball
    covering_constant: float = 0.0  # lam * sum mu(B_i) / ||u||_1
    bad_constant: float = 0.0  # max_i int |b_i| / (lam mu(B_i))
    good_constant: float = 0.0  # ||g||_1 / ||u||_1
    advisory: str | None = None

    def to_record(self) -> dict:
        return {
            "lambda": self.lam,
            "balls": [[int(c), float(r)] for c, r in self.balls],
            "omega": self.omega.tolist(),
            "overlap": self.overlap,
            "covering_constant": self.covering_constant,
            "bad_constant": self.bad_constant,
            "good_constant": self.good_constant,
            "advisory": self.advisory,
        }


@dataclass
class SuiteEntry:
    """One requested suite run inside a RunConfig."""
    suite: str
    label: str
    manifold: str | None = None
    params: dict = field(default_factory=dict)


@dataclass
class RunConfig:
    """Validated batch configuration."""
    name: str
    seed: int
    output_dir: str
    workers: int = 1
    manifolds: dict[str, dict] = field(default_factory=dict)
    degrees: list[int] = field(default_factory=lambda: [0, 1])
    time_grids: dict[str, dict] = field(default_factory=dict)
    monte_carlo: dict = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    suites: list[SuiteEntry] = field(default_factory=list)
