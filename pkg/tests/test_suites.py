import inspect
from pathlib import Path

import numpy as np
import pytest

from heatlab import config
from heatlab.harness.runner import load_config, parse_config
from heatlab.harness.suites.combinatorial import verify_covering, verify_cz_decomposition
from heatlab.harness.suites.operators import verify_davies_gaffney, verify_weak11_riesz, verify_weitzenboeck
from heatlab.harness.suites.probabilistic import verify_exit_control
from heatlab.harness.suites.volume import verify_lvd, verify_volume_comparison

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize("name", ["torus", "sphere"])
def test_lvd_passes_with_unit_constant(request, name):
    report = verify_lvd(request.getfixturevalue(name), radii=(0.05, 2.0), n_radii=4, n_points=2)
    assert report.passed
    assert report.constants["C"] == pytest.approx(1.0)
    assert report.drift == 0.0
    assert len(report.rows) == 2 * 4 * 5 // 2


@pytest.mark.parametrize("name", ["torus", "sphere"])
def test_volume_comparison_on_homogeneous_spaces(request, name):
    report = verify_volume_comparison(request.getfixturevalue(name), n_times=3, n_points=3)
    assert report.passed
    assert all(c == pytest.approx(1.0) for c in report.constants.values())
    assert report.details["nonincreasing_in_eps"]


def test_weitzenboeck_identity_on_torus(torus):
    report = verify_weitzenboeck(torus, j=1, n_fields=5, n_points=2, band_limit=4)
    assert report.passed
    assert report.manifold == torus.name


def test_cz_corpus_keeps_exact_properties():
    report = verify_cz_decomposition(n_instances=4, n_min=20, n_max=60, small_max=30, factors=(1.5, 3.0), seed=2)
    conditions = report.details["conditions"]
    assert all(conditions[f"exact_{key}"] for key in ("reconstruction", "good_bounded", "support",
                                                      "covers_omega", "partition"))
    assert conditions["maximal_oracle"]
    assert report.details["oracle_checked"] >= 1
    assert np.isfinite(report.constants["precondition"])


def test_covering_corpus_conditions_hold():
    report = verify_covering(n_instances=2, n=60, deltas=(0.5,), times=(0.2,), n_pairs=2, n_s=20, seed=3)
    assert all(report.details["conditions"].values())
    assert report.series


def test_corpus_drift_uses_refinement_threshold():
    report = verify_covering(n_instances=2, n=40, deltas=(0.5,), times=(0.2,), n_pairs=1, n_s=20, seed=5)
    assert report.threshold == config.DRIFT_THRESHOLD
    assert report.details["drift_kind"] == "split_half"
    assert "gaussian_sum_bound" in report.details["conditions"]


def test_exit_control_uses_refinement_threshold(torus):
    report = verify_exit_control(torus, n_times=2, radii=(0.5, 1.0), n_paths=40, n_steps=10)
    assert report.threshold == config.DRIFT_THRESHOLD


def test_weak11_gates_on_bump_family(torus):
    report = verify_weak11_riesz(torus, kappas=(1.0,), n_levels=3, band_limit=4)
    conditions = report.details["conditions"]
    assert conditions["bump_family_stable"] == (report.details["scale_spread"] < 0.2)
    assert report.max_ratio == pytest.approx(1.0)
    assert report.threshold == config.DRIFT_THRESHOLD
    if not conditions["bump_family_stable"]:
        assert not report.passed


def test_davies_gaffney_reports_effective_time_range(circle):
    report = verify_davies_gaffney(circle, band_limit=64)
    details = report.details
    assert details["dropped_times"]["truncation"][0] == pytest.approx(1e-3)
    assert details["t_range"][0] >= details["t_truncation"]
    assert details["small_times"] >= 3
    assert details["conditions"]["small_t_regime"]


def test_davies_gaffney_fails_without_small_times(sphere):
    report = verify_davies_gaffney(sphere, band_limit=8)
    assert report.details["t_range"][0] > 0.15
    assert report.details["small_times"] == 0
    assert not report.details["conditions"]["small_t_regime"]
    assert not report.passed


def test_full_suite_runs_the_acceptance_corpus():
    cfg = parse_config(load_config(CONFIG_DIR / "full_suite.json"), output_dir="unused")
    cz = [e for e in cfg.suites if e.suite == "cz_decomposition"]
    assert len(cz) == 1
    params = {**_defaults(verify_cz_decomposition), **cz[0].params}
    assert params["n_instances"] >= 100
    assert params["n_max"] <= 300
    assert params["small_max"] >= 50
    covering = [e for e in cfg.suites if e.suite == "covering"]
    assert tuple({**_defaults(verify_covering), **covering[0].params}["alphas"]) == (0.5, 1.0, 2.0, 4.0, 8.0)


def _defaults(fn) -> dict:
    return {name: p.default for name, p in inspect.signature(fn).parameters.items()}
