"""Gaussian upper bounds for heat kernels, their derivatives and integrated variants.

Pair grids use scaled offsets rho = s sqrt(t), s in [0, s_max], along a small fan
of directions from sampled base points. Refinement doubles the time and offset
grids (midpoints inserted) and the fitted constants are compared.
"""

from __future__ import annotations

import numpy as np

from heatlab.errors import PreconditionError
from heatlab.geometry.manifolds import ModelManifold, geodesic_distance
from heatlab.geometry.volume import ball_volumes
from heatlab.harness.fitting import (
    bisect_constant,
    d_scan,
    fit_exponential_constant,
    fit_gaussian,
    gaussian_ratio,
    gaussian_rate,
    make_report,
    relative_drift,
)
from heatlab.harness.grids import ball_cloud, directions, linear_grid, pair_fan, reach_limit, sample_points, time_grid
from heatlab.harness.oracles import KernelOracle, oracle_quadrature, scalar_kernel
from heatlab.models import BoundSpec, FitReport
from heatlab.spectral.quadrature import quadrature

SUFFIXES = {"kernel": "", "gradient": "", "d": "_d", "ddagger": "_dagger"}


def _times(oracle: KernelOracle, kind: str, times, n_times: int, refine: bool, suite: str) -> np.ndarray:
    lo = max(float(times[0]), 1.05 * oracle.min_time(kind))
    if lo > times[1]:
        raise PreconditionError(
            f"{suite} failed ({oracle.M.name}, j={oracle.j}): truncation needs t >= {lo:.4g}, grid ends at {times[1]}"
        )
    return time_grid(lo, float(times[1]), n_times, refine)


def _offsets(M: ModelManifold, t: float, s_max: float, n: int, refine: bool) -> np.ndarray:
    return np.unique(np.minimum(linear_grid(0.0, s_max, n, refine) * np.sqrt(t), reach_limit(M)))


def pair_table(oracle: KernelOracle, kind: str, ts, ys, s_max: float = 4.0, n_offsets: int = 9,
               n_fan: int = 3, refine: bool = False) -> dict[str, np.ndarray]:
    """Kernel norms over (t, y, offset, direction) with volumes and reference levels.

    Derivative kinds carry the t^{-1/2} factor in the volume column and use the
    per-(t, y) peak as level; the kernel uses its diagonal value.
    """
    M = oracle.M
    fan = directions(M.dimension, n_fan)
    cols: dict[str, list] = {k: [] for k in ("t", "rho", "data", "volume", "level")}
    for t in ts:
        offsets = _offsets(M, t, s_max, n_offsets, refine)
        for y in ys:
            xs, rho = pair_fan(M, y, offsets, fan)
            data = oracle.norms(kind, t, xs, y)
            volume = oracle.volume(xs, t) * (1.0 if kind == "kernel" else np.sqrt(t))
            level = oracle.diagonal(t, y) if kind == "kernel" else float(data.max())
            cols["t"].append(np.full(len(xs), t))
            cols["rho"].append(rho)
            cols["data"].append(data)
            cols["volume"].append(volume)
            cols["level"].append(np.full(len(xs), level))
    return {k: np.concatenate(v) for k, v in cols.items()}


def _fit(table: dict, kind: str, scale: float) -> dict[str, float]:
    if not np.any(table["data"] > 0):
        return {"C": 0.0, "D": 0.0}
    return fit_gaussian(table["t"], table["rho"], table["data"], table["volume"], table["level"],
                        scale=scale, reach=1.0 if kind == "kernel" else 2.0)


def _rate_series(table: dict, kind: str) -> np.ndarray:
    reach = 1.0 if kind == "kernel" else 2.0
    out = []
    for t in np.unique(table["t"]):
        sel = table["t"] == t
        rate = gaussian_rate(table["t"][sel], table["rho"][sel], table["data"][sel], table["level"][sel], reach=reach)
        out.append([t, rate])
    return np.array(out)


def _verify_kinds(suite: str, form: str, M: ModelManifold, j: int, kinds: tuple[str, ...], times, n_times: int,
                  n_points: int, s_max: float, n_offsets: int, n_fan: int, scale: float, band_limit: int | None,
                  seed: int) -> FitReport:
    oracle = KernelOracle(M, j, band_limit)
    ys = sample_points(M, n_points, np.random.default_rng(seed))
    constants, fine, details, series, conditions, rows = {}, {}, {}, {}, {}, []
    worst = 0.0
    for kind in kinds:
        sfx = SUFFIXES[kind]
        ts = _times(oracle, kind, times, n_times, False, suite)
        table = pair_table(oracle, kind, ts, ys, s_max, n_offsets, n_fan)
        fit = _fit(table, kind, scale)
        refined_table = pair_table(oracle, kind, _times(oracle, kind, times, n_times, True, suite), ys,
                                   s_max, n_offsets, n_fan, refine=True)
        refit = _fit(refined_table, kind, scale)
        constants.update({f"C{sfx}": fit["C"], f"D{sfx}": fit["D"]})
        fine.update({f"C{sfx}": refit["C"], f"D{sfx}": refit["D"]})
        worst = max(worst, gaussian_ratio(table["t"], table["rho"], table["data"], table["volume"], fit["C"], fit["D"]))
        if fit["D"] > 0:
            scan, monotone = d_scan(table["t"], table["rho"], table["data"], table["volume"], fit["D"])
            series[f"d_scan{sfx}"] = scan
            conditions[f"d_scan_monotone{sfx}"] = monotone
        details[f"t_min{sfx}"] = float(ts[0])
        if not np.any(table["data"] > 0):
            details[f"vanishes{sfx}"] = True
        else:
            rates = _rate_series(table, kind)
            series[f"rate_vs_t{sfx}"] = rates
            details[f"small_t_rate{sfx}"] = float(rates[0, 1])
            if kind == "kernel" and M.kind == "flat_torus" and M.dimension == 1 and ts[0] <= 1e-2:
                conditions["small_t_rate_quarter"] = abs(rates[0, 1] / 0.25 - 1.0) <= 0.15
        bound = fit["C"] / table["volume"] * np.exp(fit["C"] * table["t"] - fit["D"] * table["rho"] ** 2 / table["t"])
        rows.extend(
            {"kind": kind, "t": float(t), "rho": float(r), "data": float(d), "bound": float(b)}
            for t, r, d, b in zip(table["t"], table["rho"], table["data"], bound)
        )
    spec = BoundSpec(suite, form, tuple(constants),
                     {"j": j, "times": list(times), "n_times": n_times, "n_points": n_points,
                      "s_max": s_max, "n_offsets": n_offsets, "n_fan": n_fan})
    return make_report(spec, constants, worst, relative_drift(constants, fine), manifold=M.name,
                       details=details, series=series, rows=rows, conditions=conditions)


def verify_ue(M: ModelManifold, j: int = 0, times=(1e-3, 1.0), n_times: int = 5, n_points: int = 2,
              s_max: float = 4.0, n_offsets: int = 9, n_fan: int = 3, scale: float = 1.0,
              band_limit: int | None = None, seed: int = 0) -> FitReport:
    """|e^{-t Delta_j}(x,y)| <= C / mu(B(x, sqrt t)) e^{Ct} e^{-D rho^2 / t}."""
    return _verify_kinds("ue", "C/V(x,sqrt t) e^{Ct} e^{-D rho^2/t}", M, j, ("kernel",), times, n_times,
                         n_points, s_max, n_offsets, n_fan, scale, band_limit, seed)


def verify_grad_ue(M: ModelManifold, j: int = 0, times=(1e-3, 1.0), n_times: int = 5, n_points: int = 2,
                   s_max: float = 4.0, n_offsets: int = 9, n_fan: int = 3, scale: float = 1.0,
                   band_limit: int | None = None, seed: int = 0) -> FitReport:
    """|nabla e^{-t Delta_j}(x,y)| <= C / mu(B(x, sqrt t)) t^{-1/2} e^{Ct} e^{-D rho^2 / t}."""
    return _verify_kinds("grad_ue", "C/V(x,sqrt t) t^{-1/2} e^{Ct} e^{-D rho^2/t}", M, j, ("gradient",), times,
                         n_times, n_points, s_max, n_offsets, n_fan, scale, band_limit, seed)


def verify_d_ue(M: ModelManifold, j: int = 0, times=(1e-3, 1.0), n_times: int = 5, n_points: int = 2,
                s_max: float = 4.0, n_offsets: int = 9, n_fan: int = 3, scale: float = 1.0,
                band_limit: int | None = None, seed: int = 0) -> FitReport:
    """The same bound for d e^{-t Delta_j} and d-dagger e^{-t Delta_j}, one (C, D) pair each."""
    return _verify_kinds("d_ue", "C/V(x,sqrt t) t^{-1/2} e^{Ct} e^{-D rho^2/t}", M, j, ("d", "ddagger"), times,
                         n_times, n_points, s_max, n_offsets, n_fan, scale, band_limit, seed)


# -- integrated kernel bounds ---------------------------------------------------


def _integrals(oracle: KernelOracle, kind: str, ts, ys, resolution: int | None):
    """(t, y, |K_t(., y)| on the quadrature grid, distances, weights) per grid cell."""
    points, weights = oracle_quadrature(oracle, resolution)
    for t in ts:
        for y in ys:
            yield t, y, oracle.norms(kind, t, points, y), geodesic_distance(oracle.M, points, y), weights


def verify_weighted_lp(M: ModelManifold, j: int = 0, ps=(1.0, 2.0), gamma: float = 0.05,
                       gammas=(0.0, 0.025, 0.05, 0.1, 0.2), growth: float = 10.0, times=(0.02, 1.0),
                       n_times: int = 4, n_points: int = 2, resolution: int | None = None,
                       band_limit: int | None = None, seed: int = 0) -> FitReport:
    """int |nabla e^{-t Delta_j}(x,y)|^p e^{gamma rho^2/t} dmu(x) <= C e^{Ct} t^{-p/2} V(y, sqrt t)^{1-p}.

    The gamma scan reports the largest scanned rate whose constant stays within
    `growth` times the unweighted one.
    """
    oracle = KernelOracle(M, j, band_limit)
    ys = sample_points(M, n_points, np.random.default_rng(seed))

    def collect(refine: bool):
        rows = []
        for t, y, norms, rho, w in _integrals(oracle, "gradient", _times(oracle, "gradient", times, n_times,
                                                                           refine, "weighted_lp"), ys, resolution):
            V = float(oracle.volume(y, t)[0])
            for p in ps:
                for g in sorted(set(gammas) | {gamma, 0.0}):
                    value = float(np.sum(w * norms ** p * np.exp(g * rho ** 2 / t)))
                    rows.append({"p": p, "gamma": g, "t": float(t), "data": value, "shape": t ** (-p / 2) * V ** (1 - p)})
        return rows

    def constants_of(rows, g):
        out = {}
        for p in ps:
            sel = [r for r in rows if r["p"] == p and r["gamma"] == g]
            out[f"C_p{p:g}"] = fit_exponential_constant([r["data"] for r in sel], [r["shape"] for r in sel],
                                                        [r["t"] for r in sel])
        return out

    rows = collect(False)
    constants = constants_of(rows, gamma)
    fine = constants_of(collect(True), gamma)
    base = constants_of(rows, 0.0)
    passing = [g for g in sorted(gammas)
               if all(constants_of(rows, g)[k] <= growth * max(base[k], 1e-300) for k in base)]
    gamma_max = max(passing) if passing else 0.0
    worst = 0.0
    for r in rows:
        if r["gamma"] == gamma:
            C = constants[f"C_p{r['p']:g}"]
            worst = max(worst, r["data"] / (C * np.exp(C * r["t"]) * r["shape"]))
    scan = np.array([[g, max(constants_of(rows, g).values())] for g in sorted(gammas)])
    spec = BoundSpec("weighted_lp", "C e^{Ct} t^{-p/2} V(y,sqrt t)^{1-p}", tuple(constants),
                     {"j": j, "ps": list(ps), "gamma": gamma, "gammas": list(gammas), "times": list(times)})
    return make_report(spec, constants, worst, relative_drift(constants, fine), manifold=M.name,
                       details={"gamma_max": gamma_max, "unweighted": base},
                       series={"constant_vs_gamma": scan}, rows=rows,
                       conditions={"positive_gamma_passes": gamma_max > 0})


def verify_lr_ls(M: ModelManifold, j: int = 0, times=(0.02, 1.0), n_times: int = 5, n_points: int = 3,
                 resolution: int | None = None, band_limit: int | None = None, seed: int = 0) -> FitReport:
    """L^1, L^infinity and volume-weighted L^1 -> L^infinity norms of e^{-t Delta_j} bounded by C e^{Ct}.

    The kernel is symmetric, so the L^1 and L^infinity operator norms share the
    column integral sup_y int |K_t(x, y)| dmu(x).
    """
    oracle = KernelOracle(M, j, band_limit)
    ys = sample_points(M, n_points, np.random.default_rng(seed))

    def collect(refine: bool):
        rows = []
        ts = _times(oracle, "kernel", times, n_times, refine, "lr_ls")
        for t, y, norms, _, w in _integrals(oracle, "kernel", ts, ys, resolution):
            rows.append({"t": float(t), "ve_11": float(np.sum(w * norms)),
                         "ve_1inf": float(np.max(norms * oracle.volume(y, t)[0]))})
        return rows

    def constants_of(rows):
        ts = [r["t"] for r in rows]
        C11 = fit_exponential_constant([r["ve_11"] for r in rows], 1.0, ts)
        return {"C_11": C11, "C_infinf": C11, "C_1inf": fit_exponential_constant([r["ve_1inf"] for r in rows], 1.0, ts)}

    rows = collect(False)
    constants = constants_of(rows)
    fine = constants_of(collect(True))
    worst = max(
        max(r["ve_11"] / (constants["C_11"] * np.exp(constants["C_11"] * r["t"])),
            r["ve_1inf"] / (constants["C_1inf"] * np.exp(constants["C_1inf"] * r["t"])))
        for r in rows
    )
    spec = BoundSpec("lr_ls", "C e^{Ct}", tuple(constants), {"j": j, "times": list(times), "n_times": n_times})
    return make_report(spec, constants, worst, relative_drift(constants, fine), manifold=M.name,
                       series={"ve_11_vs_t": np.array([[r["t"], r["ve_11"]] for r in rows])}, rows=rows)


def verify_grad_riesz_tail(M: ModelManifold, j: int = 0, times=(0.05, 1.0), n_times: int = 4,
                           ratios=(0.25, 1.0, 4.0), n_points: int = 2, resolution: int | None = None,
                           band_limit: int | None = None, seed: int = 0) -> FitReport:
    """int_{rho(x,y) >= sqrt t} |nabla e^{-s Delta_j}(x,y)| dmu(x) <= C s^{-1/2} e^{-t/(Cs)} e^{Cs}, s = ratio * t."""
    oracle = KernelOracle(M, j, band_limit)
    ys = sample_points(M, n_points, np.random.default_rng(seed))
    s_min = 1.05 * oracle.min_time("gradient")

    def collect(refine: bool):
        rows = []
        points, weights = oracle_quadrature(oracle, resolution)
        for t in time_grid(times[0], times[1], n_times, refine):
            for ratio in ratios:
                s = ratio * t
                if s < s_min:
                    continue
                for y in ys:
                    outside = geodesic_distance(M, points, y) >= np.sqrt(t)
                    value = float(np.sum(weights[outside] * oracle.norms("gradient", s, points[outside], y)))
                    rows.append({"t": float(t), "s": float(s), "data": value})
        if not rows:
            raise PreconditionError(f"grad_riesz_tail failed ({M.name}, j={j}): every s lies below {s_min:.4g}")
        return rows

    def fit(rows):
        C = 0.0
        for r in rows:
            if r["data"] > 0:
                t, s, data = r["t"], r["s"], r["data"]
                C = max(C, bisect_constant(
                    lambda c: np.log(c) - 0.5 * np.log(s) - t / (c * s) + c * s - np.log(data)))
        return {"C": C}

    rows = collect(False)
    constants = fit(rows)
    fine = fit(collect(True))
    C = constants["C"]
    worst = max((r["data"] / (C * r["s"] ** -0.5 * np.exp(-r["t"] / (C * r["s"]) + C * r["s"])) for r in rows
                 if r["data"] > 0), default=0.0)
    spec = BoundSpec("grad_riesz_tail", "C s^{-1/2} e^{-t/(Cs)} e^{Cs}", ("C",),
                     {"j": j, "times": list(times), "ratios": list(ratios)})
    return make_report(spec, constants, worst, relative_drift(constants, fine), manifold=M.name,
                       series={"tail_vs_t_over_s": np.array([[r["t"] / r["s"], r["data"]] for r in rows])},
                       rows=rows)


# -- composition of Gaussian kernels ----------------------------------------------


def _margin(data: float, t: float, rho: float, log_volume: float):
    return lambda c: np.log(c) + c * t - 0.5 * log_volume - rho ** 2 / (c * t) - np.log(data)


def verify_offdiag_composition(M: ModelManifold, times=(0.05, 0.5), n_times: int = 3, n_points: int = 2,
                               s_max: float = 3.0, n_offsets: int = 7, n_fan: int = 2, n_r: int = 3, n_a: int = 8,
                               resolution: int = 96, seed: int = 0) -> FitReport:
    """Localized (2,inf) bounds of the scalar heat semigroup compose into the (1,inf) bound of T_t T_t.

    For a symmetric kernel the (1,2) hypothesis is the transpose of the (2,inf)
    one and shares its table. The composed kernel is K_{2t}; a brute-force
    quadrature composition at one pair cross-checks that identity.
    """
    ys = sample_points(M, n_points, np.random.default_rng(seed))
    fan = directions(M.dimension, n_fan)

    def collect(refine: bool):
        hyp, comp = [], []
        for t in time_grid(times[0], times[1], n_times, refine):
            r = np.sqrt(t)
            offsets = _offsets(M, t, s_max, n_offsets, refine)
            for y in ys:
                Y, wY = ball_cloud(M, y, r, 2 * n_r if refine else n_r, n_a)
                Yc = np.vstack([y[None], Y])
                vy = float(ball_volumes(M, y[None], [r])[0])
                xs, rho = pair_fan(M, y, offsets, fan)
                for x, d in zip(xs, rho):
                    X = np.vstack([x[None], ball_cloud(M, x, r, n_r, n_a)[0]])
                    vx = float(ball_volumes(M, x[None], [r])[0])
                    two_inf = float(np.sqrt(np.max(scalar_kernel(M, t, X[:, None, :], Y[None, :, :]) ** 2 @ wY)))
                    hyp.append({"t": float(t), "rho": float(d), "data": two_inf, "log_volume": np.log(vx)})
                    if d >= r:
                        value = float(np.max(np.abs(scalar_kernel(M, 2.0 * t, X[:, None, :], Yc[None, :, :]))))
                        comp.append({"t": float(t), "rho": float(d), "data": value,
                                     "log_volume": np.log(vx) + np.log(vy)})
        if not comp:
            raise PreconditionError(f"offdiag_composition failed ({M.name}): no pair with rho(x, z) >= sqrt t")
        return hyp, comp

    def fit(hyp, comp):
        def worst_c(rows):
            return max(bisect_constant(_margin(r["data"], r["t"], r["rho"], r["log_volume"]))
                       for r in rows if r["data"] > 0)
        return {"C_hypothesis": worst_c(hyp), "C_composed": worst_c(comp)}

    hyp, comp = collect(False)
    constants = fit(hyp, comp)
    fine = fit(*collect(True))

    def ratio(rows, C):
        return max(r["data"] / (C * np.exp(C * r["t"] - 0.5 * r["log_volume"] - r["rho"] ** 2 / (C * r["t"])))
                   for r in rows if r["data"] > 0)

    worst = max(ratio(hyp, constants["C_hypothesis"]), ratio(comp, constants["C_composed"]))
    points, weights = quadrature(M, resolution)
    x0 = ys[0]
    z0 = M.exp(x0, np.full(M.dimension, np.sqrt(times[0]) * 1.5 / np.sqrt(M.dimension)))
    brute = float(np.sum(weights * scalar_kernel(M, times[0], x0, points) * scalar_kernel(M, times[0], points, z0)))
    exact = float(scalar_kernel(M, 2.0 * times[0], x0, z0))
    composition_error = abs(brute - exact) / exact
    spec = BoundSpec("offdiag_composition", "C e^{Ct} V(x,sqrt t)^{-1/2} V(z,sqrt t)^{-1/2} e^{-rho^2/(Ct)}",
                     tuple(constants), {"times": list(times), "n_times": n_times, "s_max": s_max})
    return make_report(spec, constants, worst, relative_drift(constants, fine), manifold=M.name,
                       details={"composition_error": composition_error,
                                "lemma_ratio": constants["C_composed"] / constants["C_hypothesis"]},
                       series={"composed_vs_rho": np.array([[r["rho"], r["data"]] for r in comp])},
                       rows=[dict(r, role="hypothesis") for r in hyp] + [dict(r, role="composed") for r in comp],
                       conditions={"semigroup_composition": composition_error <= 1e-3})
