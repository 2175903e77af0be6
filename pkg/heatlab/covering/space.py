"""Finite metric measure spaces: validation, instance files, random corpora."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from heatlab import config
from heatlab.errors import InstanceError


@dataclass
class FiniteMetricMeasureSpace:
    """n points with a distance matrix and positive weights."""
    distances: np.ndarray  # (n, n)
    weights: np.ndarray  # (n,)
    dimension: int | None = None
    name: str = "instance"

    def __post_init__(self):
        self.distances = np.asarray(self.distances, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        D, w = self.distances, self.weights
        n = len(w)
        if D.shape != (n, n) or n == 0:
            raise InstanceError(f"instance failed ({self.name}): distance matrix {D.shape} vs {n} weights")
        if not np.all(np.isfinite(D)) or np.any(D < 0):
            raise InstanceError(f"instance failed ({self.name}): distances must be finite and nonnegative")
        if np.any(np.diag(D) != 0):
            raise InstanceError(f"instance failed ({self.name}): nonzero diagonal")
        if not np.array_equal(D, D.T):
            raise InstanceError(f"instance failed ({self.name}): distance matrix is not symmetric")
        off = D[~np.eye(n, dtype=bool)]
        if len(off) and off.min() <= 0:
            raise InstanceError(f"instance failed ({self.name}): distinct points at distance 0")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise InstanceError(f"instance failed ({self.name}): weights must be positive")
        violation = triangle_violation(D)
        if violation > 0:
            raise InstanceError(f"instance failed ({self.name}): triangle inequality violated by {violation:.3e}")

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def diameter(self) -> float:
        return float(self.distances.max())

    def ball(self, center: int, radius: float) -> np.ndarray:
        """Closed ball as a boolean mask."""
        return self.distances[center] <= radius

    def measure(self, mask: np.ndarray) -> float:
        return float(self.weights[mask].sum())

    def ball_measure(self, center: int, radius: float) -> float:
        return self.measure(self.ball(center, radius))

    def l1_norm(self, u: np.ndarray) -> float:
        return float(np.sum(self.weights * magnitude(u)))


def magnitude(u: np.ndarray) -> np.ndarray:
    """Pointwise |u| for scalar (n,) or vector (n, k) sections."""
    u = np.asarray(u, dtype=float)
    return np.abs(u) if u.ndim == 1 else np.linalg.norm(u, axis=-1)


def triangle_violation(D: np.ndarray, seed: int = 0) -> float:
    """Largest d(i,j) - d(i,k) - d(k,j) beyond a relative slack; exhaustive up to TRIANGLE_EXHAUSTIVE_MAX points."""
    n = len(D)
    slack = 1e-12 * max(float(D.max()), 1.0)
    worst = 0.0
    if n <= config.TRIANGLE_EXHAUSTIVE_MAX:
        for k in range(n):
            excess = D - (D[:, k][:, None] + D[k, :][None, :])
            worst = max(worst, float(excess.max()))
    else:
        rng = np.random.default_rng(seed)
        i, j, k = rng.integers(0, n, size=(3, config.TRIANGLE_SAMPLES))
        worst = float(np.max(D[i, j] - D[i, k] - D[k, j]))
    return worst if worst > slack else 0.0


def read_instance(path) -> tuple[FiniteMetricMeasureSpace, np.ndarray]:
    """Plain text: n, then n distance rows, then the weights row, then the u row."""
    path = Path(path)
    rows = [line.split() for line in path.read_text().splitlines() if line.strip() and not line.startswith("#")]
    try:
        n = int(rows[0][0])
        D = np.array([[float(v) for v in row] for row in rows[1:n + 1]])
        weights = np.array([float(v) for v in rows[n + 1]])
        u = np.array([float(v) for v in rows[n + 2]])
    except (IndexError, ValueError) as exc:
        raise InstanceError(f"read_instance failed ({path.name}): {exc}") from None
    if D.shape != (n, n) or len(u) != n:
        raise InstanceError(f"read_instance failed ({path.name}): expected {n} rows of {n} distances and {n} values")
    return FiniteMetricMeasureSpace(D, weights, name=path.stem), u


def write_instance(space: FiniteMetricMeasureSpace, u: np.ndarray, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [str(space.n)]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in space.distances]
    lines.append(" ".join(f"{v:.17g}" for v in space.weights))
    lines.append(" ".join(f"{v:.17g}" for v in np.asarray(u, dtype=float)))
    path.write_text("\n".join(lines) + "\n")
    return path


def graph_instance(n: int, rng: np.random.Generator, edge_scale: float = 1.0,
                   chords: int | None = None) -> FiniteMetricMeasureSpace:
    """Shortest-path metric of a weighted ring with random chords."""
    if n < 2:
        raise InstanceError(f"graph_instance failed (n={n}): need at least two points")
    ring = np.arange(n)
    heads = np.concatenate([ring, rng.integers(0, n, size=chords if chords is not None else max(n // 10, 1))])
    tails = np.concatenate([(ring + 1) % n, rng.integers(0, n, size=len(heads) - n)])
    keep = heads != tails
    lengths = rng.uniform(0.2, 1.0, size=len(heads)) * edge_scale
    # coo -> csr would sum duplicate chords; _min_graph keeps the shorter one
    W = sparse.coo_matrix((lengths[keep], (heads[keep], tails[keep])), shape=(n, n))
    D = csgraph.shortest_path(_min_graph(W, n), method="D", directed=False)
    D = np.minimum(D, D.T)
    weights = rng.uniform(0.5, 2.0, size=n)
    return FiniteMetricMeasureSpace(D, weights, name=f"graph{n}")


def _min_graph(W: sparse.coo_matrix, n: int) -> sparse.csr_matrix:
    best: dict[tuple[int, int], float] = {}
    for a, b, length in zip(W.row, W.col, W.data):
        key = (int(min(a, b)), int(max(a, b)))
        best[key] = min(best.get(key, np.inf), float(length))
    rows, cols = zip(*best)
    return sparse.csr_matrix((list(best.values()), (rows, cols)), shape=(n, n))


def torus_cloud_instance(n: int, rng: np.random.Generator, period: float = 4.0) -> FiniteMetricMeasureSpace:
    """Uniform points on a flat 2-torus with equal area weights."""
    points = rng.uniform(0.0, period, size=(n, 2))
    delta = np.abs(points[:, None, :] - points[None, :, :])
    delta = np.minimum(delta, period - delta)
    D = np.sqrt(np.sum(delta ** 2, axis=-1))
    np.fill_diagonal(D, 0.0)
    return FiniteMetricMeasureSpace(D, np.full(n, period ** 2 / n), dimension=2, name=f"torus_cloud{n}")


def random_instance(kind: str, n: int, rng: np.random.Generator) -> FiniteMetricMeasureSpace:
    if kind == "graph":
        return graph_instance(n, rng)
    if kind == "torus_cloud":
        return torus_cloud_instance(n, rng)
    raise InstanceError(f"random_instance failed: unknown kind {kind!r}")


def random_section(space: FiniteMetricMeasureSpace, rng: np.random.Generator, center: int = 0,
                   radius: float = config.HOST_RADIUS, spikes: int = 3) -> np.ndarray:
    """Gaussian-noise section supported in B(center, radius) with a few tall spikes."""
    inside = np.flatnonzero(space.ball(center, radius))
    u = np.zeros(space.n)
    u[inside] = rng.standard_normal(len(inside))
    hot = rng.choice(inside, size=min(spikes, len(inside)), replace=False)
    u[hot] += rng.uniform(5.0, 20.0, size=len(hot)) * rng.choice([-1.0, 1.0], size=len(hot))
    return u
