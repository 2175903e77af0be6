import json
from pathlib import Path

import numpy as np
import pytest

from heatlab.__main__ import EXIT_CONFIG, EXIT_OK, main
from heatlab.errors import ConfigError, ParameterError
from heatlab.harness.registry import SUITES, Suite, call_suite, check_params, get_suite, list_suites
from heatlab.harness.reports import plain
from heatlab.harness.runner import load_config, parse_config
from heatlab.models import FitReport

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

LVD_CONFIG = {
    "name": "lvd_unit",
    "seed": 1,
    "manifolds": {"torus": {"kind": "flat_torus"}},
    "suites": [{"suite": "lvd", "manifold": "torus", "n_radii": 3, "n_points": 2}],
}


def write_config(tmp_path, raw) -> str:
    path = tmp_path / "run.json"
    path.write_text(json.dumps(raw))
    return str(path)


def test_list_suites(capsys):
    assert main(["list-suites"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 23 == len(list_suites())
    assert lines[0].startswith("lvd")


def test_run_writes_reports(tmp_path):
    out = tmp_path / "reports"
    assert main(["run", write_config(tmp_path, LVD_CONFIG), "--out", str(out)]) == EXIT_OK
    for name in ("lvd_torus.json", "lvd_torus.csv", "lvd_torus__ratio_over_power.dat", "summary.json", "summary.md"):
        assert (out / name).exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["passed"] == summary["total"] == 1


def test_seed_override_reaches_reports(tmp_path):
    out = tmp_path / "seeded"
    assert main(["run", write_config(tmp_path, LVD_CONFIG), "--out", str(out), "--seed", "9"]) == EXIT_OK
    assert json.loads((out / "summary.json").read_text())["seed"] == 9


@pytest.mark.parametrize(
    "change",
    [
        {"suites": [{"suite": "no_such_suite", "manifold": "torus"}]},
        {"suites": [{"suite": "lvd", "manifold": "klein"}]},
        {"suites": [{"suite": "lvd", "manifold": "torus", "n_radii": 3, "bogus": 1}]},
        {"suites": [{"suite": "covering", "manifold": "torus"}]},
        {"suites": []},
        {"seed": -1},
        {"workers": 0},
        {"manifolds": {"torus": {"kind": "klein_bottle"}}},
        {"extra": True},
        {"suites": [{"suite": "lvd", "manifold": "torus"},
                    {"suite": "l2_riesz", "manifold": "torus", "kappas": [-1.0]}]},
        {"suites": [{"suite": "lvd", "manifold": "torus", "n_radii": 0}]},
        {"suites": [{"suite": "lvd", "manifold": "torus", "radii": [2.0, 0.05]}]},
        {"suites": [{"suite": "lvd", "manifold": "torus", "n_points": 2.5}]},
        {"suites": [{"suite": "bismut", "manifold": "torus", "T": -0.5}]},
        {"suites": [{"suite": "feynman_kac", "manifold": "torus", "scheme": "rk4"}]},
        {"suites": [{"suite": "covering", "deltas": [0.0]}]},
        {"suites": [{"suite": "cz_decomposition", "kinds": []}]},
    ],
)
def test_invalid_config_writes_nothing(tmp_path, change):
    out = tmp_path / "never"
    assert main(["run", write_config(tmp_path, {**LVD_CONFIG, **change}), "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()


def test_unknown_filter_is_a_config_error(tmp_path):
    out = tmp_path / "filtered"
    assert main(["run", write_config(tmp_path, LVD_CONFIG), "--out", str(out), "--filter", "bismut"]) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


def test_degrees_expand_entries():
    raw = {"seed": 0, "degrees": [0, 1, 2], "manifolds": {"s": {"kind": "sphere2"}},
           "suites": [{"suite": "weitzenboeck", "manifold": "s"}]}
    cfg = parse_config(raw, output_dir="unused")
    assert [e.label for e in cfg.suites] == ["weitzenboeck_s_j0", "weitzenboeck_s_j1", "weitzenboeck_s_j2"]
    assert cfg.output_dir == "unused"


def test_registry(torus):
    assert list(SUITES)[0] == "lvd"
    assert not get_suite("covering").needs_manifold
    with pytest.raises(ConfigError):
        get_suite("missing")
    with pytest.raises(ConfigError):
        check_params(get_suite("lvd"), {"radius": 1.0})
    report = call_suite(get_suite("lvd"), torus, {"n_radii": 2, "n_points": 1}, seed=4)
    assert report.name == "lvd"


def test_plain_makes_reports_json_safe():
    value = plain({"a": np.float64(np.inf), "b": [np.nan, -np.inf, 1.5], "c": np.arange(2), 3: np.int64(4)})
    assert value == {"a": "inf", "b": ["nan", "-inf", 1.5], "c": [0, 1], "3": 4}
    json.dumps(value)


def test_shipped_configs_validate():
    for path in sorted(CONFIG_DIR.glob("*.json")):
        cfg = parse_config(load_config(path), output_dir="unused")
        assert cfg.suites


def test_check_params_accepts_optional_and_integral_values():
    check_params(get_suite("bismut"), {"T": 1, "r_small": None, "band_limit": 8, "scheme": "euler_heun"})
    check_params(get_suite("weighted_lp"), {"gammas": [0.0, 0.1], "ps": [1.0, 2.0]})
    with pytest.raises(ConfigError):
        check_params(get_suite("weighted_lp"), {"ps": [0.5]})
    with pytest.raises(ConfigError):
        check_params(get_suite("bismut"), {"band_limit": 8.5})


def test_suite_value_errors_become_parameter_errors():
    def reject(level: float = 1.0) -> FitReport:
        raise ValueError(f"level must be below 1, got {level}")

    suite = Suite("rejecting", reject, "always rejects its level", needs_manifold=False)
    with pytest.raises(ParameterError, match="rejecting"):
        call_suite(suite, None, {"level": 2.0}, seed=0)
