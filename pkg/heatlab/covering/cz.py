"""Localized Calderon-Zygmund decomposition on a finite metric measure space.

The level set Omega = {Mu > lam} of the capped maximal function is covered by
Vitali-selected balls B_i = B(x_i, 5 r_i) with r_x = d(x, F) / 10, F the
complement of Omega. A discrete partition of unity on Omega splits u into a
good part g = 1_F u and bad parts b_i supported in B_i.
"""

from __future__ import annotations

import numpy as np

from heatlab import config
from heatlab.covering.maximal import maximal_function
from heatlab.covering.space import FiniteMetricMeasureSpace, magnitude
from heatlab.errors import PreconditionError
from heatlab.models import CZResult

PARTITIONS = ("shared", "first")


def vitali_select(space: FiniteMetricMeasureSpace, candidates: np.ndarray, radii: np.ndarray) -> list[int]:
    """Greedy disjoint subfamily by decreasing radius, ties by index; positions into candidates."""
    order = np.lexsort((candidates, -radii))
    taken = np.zeros(space.n, dtype=bool)
    chosen: list[int] = []
    for pos in order:
        ball = space.ball(int(candidates[pos]), radii[pos])
        if not np.any(ball & taken):
            chosen.append(int(pos))
            taken |= ball
    return chosen


def _remainder(partial, target):
    """Last share r with partial + r == target bit for bit."""
    partial, target = np.asarray(partial, dtype=float), np.asarray(target, dtype=float)
    last = target - partial
    for _ in range(8):
        total = partial + last
        miss = total != target
        if not np.any(miss):
            break
        last = np.where(miss, np.nextafter(last, np.where(total < target, np.inf, -np.inf)), last)
    return last


def _partition(memberships: np.ndarray, u: np.ndarray, mode: str) -> list[np.ndarray]:
    """Split u over the balls containing each point; membership rows follow ball order."""
    n_balls = len(memberships)
    bad = [np.zeros_like(u) for _ in range(n_balls)]
    covered = memberships.any(axis=0)
    for x in np.flatnonzero(covered):
        owners = np.flatnonzero(memberships[:, x])
        if mode == "first":
            bad[owners[0]][x] = u[x]
            continue
        share = u[x] / len(owners)
        partial = np.zeros_like(u[x])
        for i in owners[:-1]:
            bad[i][x] = share
            partial = partial + share
        bad[owners[-1]][x] = _remainder(partial, u[x])
    return bad


def reconstruct(result: CZResult) -> np.ndarray:
    """g + sum_i b_i accumulated in ball order."""
    total = result.good.copy()
    for b in result.bad:
        total = total + b
    return total


def _trivial(u: np.ndarray, lam: float, advisory: str | None) -> CZResult:
    n = len(u)
    return CZResult(lam=float(lam), good=u.copy(), balls=[], bad=[], omega=np.array([], dtype=int),
                    complement=np.arange(n), good_constant=1.0 if np.any(u) else 0.0, advisory=advisory)


def cz_decompose(space: FiniteMetricMeasureSpace, u, lam: float, center: int = 0,
                 host_radius: float = config.HOST_RADIUS, cap: float = config.MAXIMAL_RADIUS_CAP,
                 precondition: float = config.CZ_PRECONDITION_C, partition: str = "shared") -> CZResult:
    """Decompose u supported in the host ball B(center, 1) at level lam."""
    if host_radius != config.HOST_RADIUS:
        raise PreconditionError(
            f"cz_decompose failed ({space.name}): host radius {host_radius:g} != {config.HOST_RADIUS:g}; "
            f"rescale distances by {config.HOST_RADIUS / host_radius:g} (the cap {cap:g} is calibrated to radius 1)"
        )
    if partition not in PARTITIONS:
        raise ValueError(f"cz_decompose failed ({space.name}): unknown partition {partition!r}")
    if not lam > 0:
        raise ValueError(f"cz_decompose failed ({space.name}): lam must be positive, got {lam}")
    u = np.asarray(u, dtype=float)
    host = space.ball(center, host_radius)
    if np.any(magnitude(u)[~host] != 0):
        raise PreconditionError(f"cz_decompose failed ({space.name}): u is not supported in the host ball")

    host_average = space.l1_norm(u) / space.measure(host)
    if not lam > precondition * host_average:
        return _trivial(u, lam, f"lam <= {precondition:g} * average of |u| over the host ball; g = u")

    Mu = maximal_function(space, u, cap)
    in_omega = Mu > lam
    omega = np.flatnonzero(in_omega)
    complement = np.flatnonzero(~in_omega)
    if not len(omega):
        return _trivial(u, lam, None)
    if not len(complement):
        raise PreconditionError(f"cz_decompose failed ({space.name}): level set covers the whole space at lam={lam:g}")

    r = space.distances[np.ix_(omega, complement)].min(axis=1) / 10.0
    chosen = vitali_select(space, omega, r)
    balls = [(int(omega[p]), float(5.0 * r[p])) for p in chosen]
    memberships = np.array([space.ball(c, s) for c, s in balls])

    good = np.where(in_omega.reshape((-1,) + (1,) * (u.ndim - 1)), 0.0, u)
    bad = _partition(memberships, u, partition)

    norm = space.l1_norm(u)
    ball_measures = np.array([space.measure(m) for m in memberships])
    overlaps = (memberships.astype(int) @ memberships.T.astype(int)) > 0
    np.fill_diagonal(overlaps, False)
    bad_mass = np.array([space.l1_norm(b) for b in bad])
    return CZResult(
        lam=float(lam),
        good=good,
        balls=balls,
        bad=bad,
        omega=omega,
        complement=complement,
        overlap=int(overlaps.sum(axis=1).max()),
        covering_constant=float(lam * ball_measures.sum() / norm),
        bad_constant=float(np.max(bad_mass / (lam * ball_measures))),
        good_constant=float(space.l1_norm(good) / norm),
    )


def check_properties(space: FiniteMetricMeasureSpace, u, result: CZResult) -> dict[str, bool]:
    """Exact decomposition properties; constant-bearing ones are carried on the result."""
    u = np.asarray(u, dtype=float)
    memberships = [space.ball(c, s) for c, s in result.balls]
    in_omega = np.zeros(space.n, dtype=bool)
    in_omega[result.omega] = True
    covered = np.zeros(space.n, dtype=bool)
    for m in memberships:
        covered |= m
    return {
        "reconstruction": bool(np.array_equal(reconstruct(result), u)),
        "good_bounded": bool(np.all(magnitude(result.good)[result.complement] <= result.lam)),
        "support": all(np.all(magnitude(b)[~m] == 0) for b, m in zip(result.bad, memberships)),
        "covers_omega": bool(np.array_equal(covered, in_omega)) if result.balls else not len(result.omega),
        "partition": bool(len(np.intersect1d(result.omega, result.complement)) == 0
                          and len(result.omega) + len(result.complement) == space.n),
    }


def calibrate_precondition(instances, cap: float = config.MAXIMAL_RADIUS_CAP) -> float:
    """Smallest C such that lam > C * avg_B |u| keeps Omega inside 2B on every (space, u, center)."""
    worst = 0.0
    for space, u, center in instances:
        host = space.ball(center, config.HOST_RADIUS)
        average = space.l1_norm(u) / space.measure(host)
        if average == 0:
            continue
        outside = space.distances[center] > 2.0 * config.HOST_RADIUS
        if not outside.any():
            continue
        threshold = float(maximal_function(space, u, cap)[outside].max())
        worst = max(worst, threshold / average)
    return worst
