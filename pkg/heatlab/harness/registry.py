"""Name -> suite table, in the order the suites are listed and run."""

from __future__ import annotations

import inspect
import math
from dataclasses import dataclass
from typing import Callable

from heatlab.errors import ConfigError, HeatlabError, ParameterError
from heatlab.geometry.manifolds import ModelManifold
from heatlab.harness.suites import combinatorial, gaussian, operators, probabilistic, volume
from heatlab.models import FitReport


@dataclass(frozen=True)
class Suite:
    name: str
    fn: Callable[..., FitReport]
    description: str
    needs_manifold: bool = True

    def parameters(self) -> list[str]:
        names = list(inspect.signature(self.fn).parameters)
        return names[1:] if self.needs_manifold else names


_TABLE = (
    Suite("lvd", volume.verify_lvd, "local volume doubling mu(B(z,R))/mu(B(z,r)) <= C e^{CR} (R/r)^m"),
    Suite("volume_comparison", volume.verify_volume_comparison, "volume comparison with one constant per eps"),
    Suite("ue", gaussian.verify_ue, "Gaussian upper bound for the kernel of e^{-t Delta_j}"),
    Suite("grad_ue", gaussian.verify_grad_ue, "Gaussian upper bound for the gradient of the kernel"),
    Suite("d_ue", gaussian.verify_d_ue, "Gaussian upper bounds for d and d-dagger of the kernel"),
    Suite("weighted_lp", gaussian.verify_weighted_lp, "Gaussian-weighted L^p bounds for the gradient kernel"),
    Suite("pp_bound", operators.verify_pp_bound, "L^p -> L^p bound for sqrt(t) nabla e^{-t Delta_j}"),
    Suite("davies_gaffney", operators.verify_davies_gaffney, "three-term Davies-Gaffney estimates between disjoint regions"),
    Suite("weak11_riesz", operators.verify_weak11_riesz, "weak (1,1) constant of nabla (Delta_1 + kappa)^{-1/2}"),
    Suite("cz_inequality", operators.verify_cz_inequality, "L^p Calderon-Zygmund inequality for the Hessian"),
    Suite("offdiag_composition", gaussian.verify_offdiag_composition, "off-diagonal (2, inf) bound and its semigroup composition"),
    Suite("semigroup_domination", operators.verify_semigroup_domination, "|e^{-t Delta_j} alpha| <= e^{-at} e^{-t Delta_0}|alpha|"),
    Suite("feynman_kac", probabilistic.verify_feynman_kac, "covariant Feynman-Kac estimator against the spectral oracle"),
    Suite("bismut", probabilistic.verify_bismut, "global and local Bismut estimators against the spectral gradient"),
    Suite("weitzenboeck", operators.verify_weitzenboeck, "Weitzenboeck identity residual and V_1 = Ric"),
    Suite("l2_riesz", operators.verify_l2_riesz, "L^2 bounds for the Riesz transforms and the resolvent"),
    Suite("est_l2", operators.verify_est_l2, "sup_t ||sqrt(t) (d + d-dagger) e^{-t Delta_j}||_{2,2} <= (2e)^{-1/2}"),
    Suite("lr_ls", gaussian.verify_lr_ls, "volume-weighted L^1, L^inf and L^1 -> L^inf bounds"),
    Suite("grad_riesz_tail", gaussian.verify_grad_riesz_tail, "integrated gradient-kernel tail outside sqrt(t)-balls"),
    Suite("apriori", probabilistic.verify_apriori, "a-priori bound sup |nabla e^{-T Delta_j} alpha| / ||alpha||_inf"),
    Suite("exit_control", probabilistic.verify_exit_control, "moments of the exit-adapted control"),
    Suite("cz_decomposition", combinatorial.verify_cz_decomposition,
          "localized Calderon-Zygmund decomposition on a random corpus", needs_manifold=False),
    Suite("covering", combinatorial.verify_covering,
          "separated sets, cardinality bound, Gaussian and dyadic sums", needs_manifold=False),
)

SUITES: dict[str, Suite] = {s.name: s for s in _TABLE}


def get_suite(name: str) -> Suite:
    try:
        return SUITES[name]
    except KeyError:
        raise ConfigError(f"suite lookup failed: unknown suite {name!r}") from None


def list_suites() -> list[tuple[str, str]]:
    return [(s.name, s.description) for s in _TABLE]


CHOICES = {
    "scheme": ("geodesic_step", "euler_heun"),
    "partition": ("shared", "first"),
    "kinds": ("graph", "torus_cloud"),
}
NONNEGATIVE = {"j", "seed", "gamma", "gammas", "additive", "floor", "relative_paths"}
RANGES = {"times", "radii", "s_range"}
MIN_VALUE = {"ps": 1.0}


def _number(value, integer: bool) -> bool:
    if isinstance(value, bool):
        return False
    if integer:
        return isinstance(value, int)
    return isinstance(value, (int, float)) and math.isfinite(value)


def _check_scalar(where: str, key: str, value, integer: bool) -> None:
    if not _number(value, integer):
        kind = "an integer" if integer else "a finite number"
        raise ConfigError(f"{where}: expected {kind}, got {value!r}")
    lowest = MIN_VALUE.get(key)
    if lowest is not None and value < lowest:
        raise ConfigError(f"{where}: expected values >= {lowest}, got {value!r}")
    if key in NONNEGATIVE:
        if value < 0:
            raise ConfigError(f"{where}: expected a value >= 0, got {value!r}")
    elif value <= 0:
        raise ConfigError(f"{where}: expected a positive value, got {value!r}")


def _check_value(suite: Suite, param: inspect.Parameter, value) -> None:
    key, default = param.name, param.default
    where = f"suite {suite.name} failed (config.{key})"
    if key in CHOICES:
        items = value if isinstance(default, tuple) else [value]
        if not isinstance(items, (list, tuple)) or not items or any(v not in CHOICES[key] for v in items):
            raise ConfigError(f"{where}: expected one of {list(CHOICES[key])}, got {value!r}")
        return
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigError(f"{where}: expected a nonempty list, got {value!r}")
        integer = all(isinstance(v, int) for v in default)
        for item in value:
            _check_scalar(where, key, item, integer)
        if key in RANGES and len(default) == 2 and (len(value) != 2 or value[0] > value[1]):
            raise ConfigError(f"{where}: expected [lo, hi] with lo <= hi, got {value!r}")
        return
    if default is None:
        if value is None:
            return
        annotation = str(param.annotation)
        if "str" in annotation:
            if not isinstance(value, str):
                raise ConfigError(f"{where}: expected a string, got {value!r}")
            return
        _check_scalar(where, key, value, "int" in annotation)
        return
    _check_scalar(where, key, value, isinstance(default, int) and not isinstance(default, bool))


def check_params(suite: Suite, params: dict) -> None:
    """Reject unknown parameter names and values the suite cannot run with.

    The expected kind of each value follows the suite's keyword default: integers
    and numbers must be positive (a few keys allow zero), tuples become nonempty
    lists of such numbers, and [lo, hi] ranges must be ordered.
    """
    allowed = set(suite.parameters())
    unknown = sorted(set(params) - allowed)
    if unknown:
        raise ConfigError(f"suite {suite.name} failed (config): unknown parameters {unknown}")
    signature = inspect.signature(suite.fn).parameters
    for key, value in params.items():
        _check_value(suite, signature[key], value)


def call_suite(suite: Suite, M: ModelManifold | None, params: dict, seed: int, workers: int = 1) -> FitReport:
    """Run one suite; seed and workers are passed only to suites that accept them.

    A ValueError the suite raises for its inputs comes back as ParameterError.
    """
    kwargs = dict(params)
    accepted = suite.parameters()
    if "seed" in accepted:
        kwargs.setdefault("seed", seed)
    if "workers" in accepted:
        kwargs.setdefault("workers", workers)
    try:
        if suite.needs_manifold:
            return suite.fn(M, **kwargs)
        return suite.fn(**kwargs)
    except HeatlabError:
        raise
    except ValueError as exc:
        raise ParameterError(f"suite {suite.name} failed (params): {exc}") from exc
