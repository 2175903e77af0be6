"""Monte-Carlo suites: Feynman-Kac and Bismut estimators against the spectral oracle,
the a-priori gradient bound and the moments of the exit-adapted control.

Estimator suites report max_ratio = max |z| / SIGMA_MULTIPLE and measure drift as
the departure of the standard error from the 1/sqrt(n) law when the path count
doubles.
"""

from __future__ import annotations

import numpy as np

from heatlab import config
from heatlab.errors import PreconditionError
from heatlab.estimators.bismut import bismut_global, bismut_local, exit_probability
from heatlab.estimators.feynman_kac import feynman_kac, scalar_feynman_kac
from heatlab.estimators.fields import parallel_field, random_band_limited_field
from heatlab.estimators.gradient_bounds import spectral_gradient, spectral_value, sup_gradient_bound
from heatlab.geometry.manifolds import ModelManifold
from heatlab.harness.fitting import fit_exponential_constant, make_report, relative_drift
from heatlab.harness.grids import sample_points, time_grid
from heatlab.harness.suites.operators import potential_lower_bound, suite_basis
from heatlab.models import BoundSpec, FitReport, MCEstimate, PathConfig
from heatlab.stochastic.controls import control_exit_adapted, moment_of_control
from heatlab.stochastic.development import develop_path


def _label(x) -> str:
    return ",".join(f"{v:.6g}" for v in np.atleast_1d(x))


def _row(check: str, x, T: float, est: MCEstimate, reference, z: np.ndarray, **extra) -> dict:
    return {
        "check": check,
        "x": _label(x),
        "T": float(T),
        "value": _label(est.value),
        "reference": _label(reference),
        "std_error": est.vector_error,
        "z": float(np.max(z)),
        "flagged": est.flagged,
        **extra,
    }


def _se_drift(coarse: MCEstimate, fine: MCEstimate) -> float:
    """|se(2n) sqrt 2 / se(n) - 1|; 0 when the estimator has no spread."""
    if coarse.vector_error == 0:
        return 0.0 if fine.vector_error == 0 else np.inf
    return abs(fine.vector_error * np.sqrt(fine.n_paths / coarse.n_paths) / coarse.vector_error - 1.0)


def _pairing(gradient: np.ndarray, xi: np.ndarray) -> np.ndarray:
    return np.atleast_1d(np.sum(gradient * xi))


def verify_feynman_kac(M: ModelManifold, j: int = 0, n_samples: int = 10, times=(0.1, 1.0),
                       n_paths: int = 10_000, n_steps: int | None = None, scheme: str | None = None,
                       field_band: float = 6.0, split=(0.2, 0.3), relative_paths: int = 0,
                       relative_time: float = 0.25, relative_tolerance: float = 0.02,
                       band_limit: int | None = None, workers: int = 1, seed: int = 0) -> FitReport:
    """Covariant Feynman-Kac against e^{-T Delta_j} alpha (x) on (x, T) pairs.

    Also checks the two-step composition e^{-T2 Delta} e^{-T1 Delta} at estimator
    level and the pointwise domination |e^{-T Delta_j} alpha| <= e^{-aT} e^{-T Delta_0}|alpha|.
    """
    sigma = config.SIGMA_MULTIPLE
    basis = suite_basis(M, j, band_limit, "verify_feynman_kac")
    rng = np.random.default_rng(seed)
    alpha = random_band_limited_field(basis, rng, band=field_band)
    points = sample_points(M, n_samples, rng)
    ts = time_grid(times[0], times[1], n_samples)
    mc = {"n_steps": n_steps, "scheme": scheme, "workers": workers}

    rows, z_all = [], []
    estimates = []
    for k, (x, T) in enumerate(zip(points, ts)):
        est = feynman_kac(M, alpha, x, T, n_paths, seed + k, **mc)
        reference = spectral_value(alpha, x, T)
        z = est.z_scores(reference)
        z_all.append(z.max())
        estimates.append(est)
        rows.append(_row("oracle", x, T, est, reference, z))

    T1, T2 = split
    x = points[0]
    composed = feynman_kac(M, alpha.evolve(T1), x, T2, n_paths, seed + n_samples, **mc)
    reference = spectral_value(alpha, x, T1 + T2)
    z = composed.z_scores(reference)
    z_all.append(z.max())
    rows.append(_row("composition", x, T1 + T2, composed, reference, z))

    a = potential_lower_bound(M, j)
    T = ts[0]
    scalar = scalar_feynman_kac(M, alpha, x, T, n_paths, seed, n_steps=n_steps, scheme=scheme, workers=workers)
    lhs = float(np.linalg.norm(estimates[0].value))
    rhs = float(np.exp(-a * T) * scalar.value[0])
    slack = sigma * (estimates[0].vector_error + scalar.vector_error)
    conditions = {"domination": lhs <= rhs + slack}

    details = {
        "n_paths": n_paths,
        "flagged": int(sum(e.flagged for e in estimates) + composed.flagged),
        "domination": {"lhs": lhs, "rhs": rhs, "slack": slack, "a": a},
    }
    if relative_paths:
        est = feynman_kac(M, alpha, x, relative_time, relative_paths, seed + n_samples + 1, **mc)
        reference = spectral_value(alpha, x, relative_time)
        error = float(np.linalg.norm(est.value - reference) / max(np.linalg.norm(reference), 1e-300))
        details["relative_error"] = error
        conditions["relative_error"] = error <= relative_tolerance
        rows.append(_row("relative", x, relative_time, est, reference, est.z_scores(reference)))

    doubled = feynman_kac(M, alpha, points[0], ts[0], 2 * n_paths, seed, **mc)
    max_z = float(max(z_all))
    spec = BoundSpec("feynman_kac", "|MC - e^{-T Delta_j} alpha(x)| <= sigma se", ("max_z",),
                     {"j": j, "n_samples": n_samples, "times": list(times), "n_paths": n_paths})
    return make_report(
        spec, {"max_z": max_z}, max_z / sigma, _se_drift(estimates[0], doubled), manifold=M.name,
        details=details, conditions=conditions,
        series={"z_vs_T": np.column_stack([ts, z_all[:n_samples]])},
        rows=rows,
    )


def _pick_radius(M: ModelManifold, x, T: float, candidates, accept, n_paths: int, seed: int,
                 n_steps: int | None, scheme: str | None) -> tuple[float, float]:
    for r in candidates:
        p = exit_probability(M, x, T, r, n_paths, seed, n_steps, scheme)
        if accept(p):
            return float(r), p
    raise PreconditionError(
        f"verify_bismut failed ({M.name}): no radius in {list(np.round(candidates, 4))} meets the exit-probability regime"
    )


def verify_bismut(M: ModelManifold, j: int = 0, n_samples: int = 4, T: float = 0.5, n_paths: int = 10_000,
                  n_steps: int | None = None, scheme: str | None = None, field_band: float = 6.0,
                  r_small: float | None = None, r_large: float | None = None, exit_paths: int = 20_000,
                  band_limit: int | None = None, workers: int = 1, seed: int = 0) -> FitReport:
    """Global and local Bismut estimators of (nabla e^{-T Delta_j} alpha (x), xi) against the oracle.

    The small radius sits in the regime where most paths exit (> 0.5); the large
    one where almost none do (< 1e-4), where local and global must agree.
    """
    sigma = config.SIGMA_MULTIPLE
    basis = suite_basis(M, j, band_limit, "verify_bismut")
    rng = np.random.default_rng(seed)
    alpha = random_band_limited_field(basis, rng, band=field_band)
    points = sample_points(M, n_samples, rng)
    xis = rng.standard_normal((n_samples, M.dimension, basis.components))
    xis /= np.linalg.norm(xis.reshape(n_samples, -1), axis=1)[:, None, None]
    mc = {"n_steps": n_steps, "scheme": scheme, "workers": workers}
    scale = np.sqrt(2.0 * M.dimension * T)

    x0 = points[0]
    if r_small is None:
        r_small, p_small = _pick_radius(M, x0, T, scale * np.array([0.5, 0.35, 0.25]), lambda p: p > 0.5,
                                        exit_paths, seed, n_steps, scheme)
    else:
        p_small = exit_probability(M, x0, T, r_small, exit_paths, seed, n_steps, scheme)
    if r_large is None:
        r_large, p_large = _pick_radius(M, x0, T, scale * np.array([2.0, 3.0, 4.0, 6.0]), lambda p: p < 1e-4,
                                        exit_paths, seed, n_steps, scheme)
    else:
        p_large = exit_probability(M, x0, T, r_large, exit_paths, seed, n_steps, scheme)

    rows, z_all, first = [], [], None
    for k, (x, xi) in enumerate(zip(points, xis)):
        reference = _pairing(spectral_gradient(alpha, x, T), xi)
        glob = bismut_global(M, alpha, x, T, xi, n_paths, seed + k, **mc)
        small = bismut_local(M, alpha, x, T, r_small, xi, n_paths, seed + k, **mc)
        large = bismut_local(M, alpha, x, T, r_large, xi, n_paths, seed + k, **mc)
        checks = {
            "global": (glob, reference, glob.z_scores(reference)),
            "local_small": (small, reference, small.z_scores(reference)),
            "local_large": (large, glob.value, large.z_scores(glob.value, other=glob)),
        }
        for name, (est, ref, z) in checks.items():
            z_all.append(float(z.max()))
            rows.append(_row(name, x, T, est, ref, z, radius=r_small if name == "local_small" else
                             (r_large if name == "local_large" else np.inf)))
        if first is None:
            first = glob

    if M.kind == "flat_torus":
        flat = bismut_global(M, parallel_field(basis), x0, T, xis[0], n_paths, seed + n_samples, **mc)
        z = flat.z_scores(np.zeros(1))
        z_all.append(float(z.max()))
        rows.append(_row("parallel", x0, T, flat, np.zeros(1), z))

    doubled = bismut_global(M, alpha, x0, T, xis[0], 2 * n_paths, seed, **mc)
    max_z = float(max(z_all))
    spec = BoundSpec("bismut", "|MC - (nabla e^{-T Delta_j} alpha(x), xi)| <= sigma se", ("max_z",),
                     {"j": j, "T": T, "n_samples": n_samples, "n_paths": n_paths})
    return make_report(
        spec, {"max_z": max_z}, max_z / sigma, _se_drift(first, doubled), manifold=M.name,
        details={"r_small": r_small, "exit_small": p_small, "r_large": r_large, "exit_large": p_large},
        conditions={"exit_small_regime": p_small > 0.5, "exit_large_regime": p_large < 1e-4},
        rows=rows,
    )


def verify_apriori(M: ModelManifold, j: int = 1, times=(0.05, 1.0), n_times: int = 5, n_fields: int = 20,
                   n_points: int = 50, field_band: float | None = None, band_limit: int | None = None,
                   seed: int = 0) -> FitReport:
    """sup |nabla e^{-T Delta_j} alpha| / ||alpha||_inf <= C T^{-1/2} e^{CT}."""
    basis = suite_basis(M, j, band_limit, "verify_apriori")
    rng = np.random.default_rng(seed)
    fields = [random_band_limited_field(basis, rng, band=field_band) for _ in range(n_fields)]
    points = sample_points(M, n_points, rng)

    def fit(refine: bool):
        ts = time_grid(times[0], times[1], n_times, refine)
        data = sup_gradient_bound(M, j, ts, points, fields).max(axis=(1, 2))
        return fit_exponential_constant(data, ts ** -0.5, ts), ts, data

    C, ts, data = fit(False)
    C_fine = fit(True)[0]
    bound = C * np.exp(C * ts) / np.sqrt(ts)
    spec = BoundSpec("apriori", "C T^{-1/2} e^{C T}", ("C",),
                     {"j": j, "times": list(times), "n_times": n_times, "n_fields": n_fields})
    return make_report(
        spec, {"C": C}, float(np.max(data / bound)), relative_drift({"C": C}, {"C": C_fine}), manifold=M.name,
        series={"sqrtT_ratio": np.column_stack([ts, data * np.sqrt(ts)])},
        rows=[{"T": float(t), "sup_ratio": float(d), "bound": float(b)} for t, d, b in zip(ts, data, bound)],
    )


def _control_moments(M: ModelManifold, x0, ts, radii, n_paths: int, n_steps: int, q: float, seed: int) -> np.ndarray:
    xi = np.eye(M.dimension)[:, :1]
    out = np.zeros((len(ts), len(radii)))
    for a, t in enumerate(ts):
        cfg = PathConfig(horizon=float(t), n_steps=n_steps, master_seed=seed)
        path = develop_path(M, x0, cfg, n_paths=n_paths)
        for b, r in enumerate(radii):
            moments = moment_of_control(control_exit_adapted(path, t, r, xi), cfg.dt)
            out[a, b] = np.mean(moments ** q) ** (1.0 / q)
    return out


def verify_exit_control(M: ModelManifold, times=(0.1, 1.0), n_times: int = 4, radii=(0.25, 0.5, 1.0),
                        n_paths: int = 2000, n_steps: int | None = None, q: float = 2.0,
                        seed: int = 0) -> FitReport:
    """E[(int |k'|^2)^{q/2}]^{1/q} <= C t^{-1/2} e^{C (t/r + t/r^2)} for the exit-adapted control on horizon t."""
    n_steps = n_steps or config.DEFAULT_N_STEPS
    x0 = M.default_point()
    ts = time_grid(times[0], times[1], n_times)
    radii = np.asarray(radii, dtype=float)
    tt, rr = np.meshgrid(ts, radii, indexing="ij")
    tau = tt / rr + tt / rr ** 2

    data = _control_moments(M, x0, ts, radii, n_paths, n_steps, q, seed)
    fine = _control_moments(M, x0, ts, radii, n_paths, 2 * n_steps, q, seed)
    C = fit_exponential_constant(data, tt ** -0.5, tau)
    C_fine = fit_exponential_constant(fine, tt ** -0.5, tau)
    bound = C * np.exp(C * tau) / np.sqrt(tt)
    spec = BoundSpec("exit_control", "C t^{-1/2} e^{C (t/r + t/r^2)}", ("C",),
                     {"times": list(times), "n_times": n_times, "radii": radii.tolist(), "q": q, "n_paths": n_paths})
    return make_report(
        spec, {"C": C}, float(np.max(data / bound)), relative_drift({"C": C}, {"C": C_fine}), manifold=M.name,
        series={f"r{r:g}": np.column_stack([ts, data[:, b] * np.sqrt(ts)]) for b, r in enumerate(radii)},
        rows=[{"t": float(t), "r": float(r), "moment": float(d), "bound": float(bd)}
              for t, r, d, bd in zip(tt.ravel(), rr.ravel(), data.ravel(), bound.ravel())],
    )
