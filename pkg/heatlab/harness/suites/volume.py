"""Local volume doubling and volume comparison."""

from __future__ import annotations

import numpy as np

from heatlab.geometry.manifolds import ModelManifold, geodesic_distance
from heatlab.geometry.volume import ball_volumes
from heatlab.harness.fitting import fit_exponential_constant, make_report, relative_drift
from heatlab.harness.grids import sample_points, time_grid
from heatlab.models import BoundSpec, FitReport


def _doubling_data(M: ModelManifold, points: np.ndarray, radii: np.ndarray):
    r, R, ratio = [], [], []
    for z in points:
        vols = ball_volumes(M, np.repeat(z[None], len(radii), axis=0), radii)
        for a in range(len(radii)):
            for b in range(a, len(radii)):
                r.append(radii[a])
                R.append(radii[b])
                ratio.append(vols[b] / vols[a])
    return np.array(r), np.array(R), np.array(ratio)


def verify_lvd(M: ModelManifold, radii=(0.05, 2.0), n_radii: int = 6, n_points: int = 3, seed: int = 0) -> FitReport:
    """mu(B(z,R)) / mu(B(z,r)) <= C e^{CR} (R/r)^m for r <= R."""
    m = M.dimension
    points = sample_points(M, n_points, np.random.default_rng(seed))

    def fit(refine: bool):
        r, R, ratio = _doubling_data(M, points, time_grid(radii[0], radii[1], n_radii, refine))
        return fit_exponential_constant(ratio, (R / r) ** m, R, floor=1.0), r, R, ratio

    C, r, R, ratio = fit(False)
    C_fine = fit(True)[0]
    bound = C * np.exp(C * R) * (R / r) ** m
    spec = BoundSpec("lvd", "C e^{C R} (R/r)^m", ("C",), {"radii": list(radii), "n_radii": n_radii, "n_points": n_points})
    return make_report(
        spec, {"C": C}, float(np.max(ratio / bound)), relative_drift({"C": C}, {"C": C_fine}),
        manifold=M.name,
        details={"equal_radius_max": float(ratio[r == R].max())},
        series={"ratio_over_power": np.column_stack([R, ratio / (R / r) ** m])},
        rows=[{"r": float(a), "R": float(b), "ratio": float(c)} for a, b, c in zip(r, R, ratio)],
    )


def verify_volume_comparison(M: ModelManifold, epsilons=(0.25, 0.5, 1.0), times=(0.01, 1.0), n_times: int = 5,
                             n_points: int = 6, seed: int = 0) -> FitReport:
    """mu(B(x2, sqrt t)) / mu(B(x1, sqrt t)) <= C e^{C t / eps} e^{eps rho^2 / t}, one C per eps."""
    points = sample_points(M, n_points, np.random.default_rng(seed))
    i, k = np.meshgrid(np.arange(n_points), np.arange(n_points), indexing="ij")
    i, k = i.ravel(), k.ravel()
    rho = geodesic_distance(M, points[i], points[k])

    def fit(refine: bool):
        constants, data = {}, []
        ts = time_grid(times[0], times[1], n_times, refine)
        for t in ts:
            vols = ball_volumes(M, points, np.full(n_points, np.sqrt(t)))
            data.append((t, vols[k] / vols[i]))
        for eps in epsilons:
            C = 1.0
            for t, ratio in data:
                C = max(C, fit_exponential_constant(ratio, np.exp(eps * rho ** 2 / t), t / eps, floor=1.0))
            constants[f"C_eps{eps:g}"] = C
        return constants, data

    constants, data = fit(False)
    fine, _ = fit(True)
    worst = 0.0
    rows = []
    for eps in epsilons:
        C = constants[f"C_eps{eps:g}"]
        for t, ratio in data:
            bound = C * np.exp(C * t / eps + eps * rho ** 2 / t)
            worst = max(worst, float(np.max(ratio / bound)))
            rows.extend({"eps": eps, "t": float(t), "rho": float(d), "ratio": float(q)} for d, q in zip(rho, ratio))
    scan = np.array([[eps, constants[f"C_eps{eps:g}"]] for eps in sorted(epsilons)])
    spec = BoundSpec("volume_comparison", "C e^{C t/eps} e^{eps rho^2/t}", tuple(constants),
                     {"epsilons": list(epsilons), "times": list(times), "n_times": n_times})
    return make_report(
        spec, constants, worst, relative_drift(constants, fine), manifold=M.name,
        details={"nonincreasing_in_eps": bool(np.all(np.diff(scan[:, 1]) <= 1e-9 * scan[1:, 1]))},
        series={"C_vs_eps": scan},
        rows=rows,
    )
