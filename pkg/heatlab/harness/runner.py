"""Batch runner: parse and validate a run config, execute its suite entries, write the reports.

Validation is complete before the first file is written, so a ConfigError
never leaves partial outputs behind.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from heatlab import config
from heatlab.errors import ConfigError, HeatlabError
from heatlab.geometry.manifolds import ModelManifold, manifold_from_spec
from heatlab.harness.registry import SUITES, call_suite, check_params, get_suite
from heatlab.harness.reports import plain, summary_record, write_report, write_summary
from heatlab.models import FitReport, RunConfig, SuiteEntry

MC_KEYS = ("n_paths", "n_steps", "scheme")
TOP_LEVEL = ("name", "seed", "output_dir", "workers", "manifolds", "degrees", "time_grids",
             "monte_carlo", "tolerances", "suites")


def load_config(path) -> dict:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"load_config failed ({path}): {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"load_config failed ({path}): line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"load_config failed ({path}): top level must be an object")
    raw.setdefault("name", path.stem)
    return raw


def _int(raw: dict, key: str, minimum: int, default=None) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"parse_config failed ({key}): expected an integer >= {minimum}, got {value!r}")
    return value


def _manifolds(raw: dict) -> dict[str, ModelManifold]:
    specs = raw.get("manifolds", {})
    if not isinstance(specs, dict):
        raise ConfigError("parse_config failed (manifolds): expected a mapping name -> spec")
    built = {}
    for name, spec in specs.items():
        if not isinstance(spec, dict):
            raise ConfigError(f"parse_config failed (manifolds.{name}): expected a mapping")
        try:
            built[name] = manifold_from_spec(spec)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"parse_config failed (manifolds.{name}): {exc}") from exc
    return built


def _time_grids(raw: dict) -> dict[str, dict]:
    grids = raw.get("time_grids", {})
    if not isinstance(grids, dict):
        raise ConfigError("parse_config failed (time_grids): expected a mapping name -> {lo, hi, n}")
    for name, grid in grids.items():
        try:
            lo, hi, n = float(grid["lo"]), float(grid["hi"]), int(grid["n"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"parse_config failed (time_grids.{name}): needs numeric lo, hi, n") from exc
        if not (0 < lo <= hi and n >= 1):
            raise ConfigError(f"parse_config failed (time_grids.{name}): empty grid ({lo}, {hi}, {n})")
    return grids


def _defaults(raw: dict, key: str, allowed: tuple[str, ...] | None = None) -> dict:
    section = raw.get(key, {})
    if not isinstance(section, dict):
        raise ConfigError(f"parse_config failed ({key}): expected a mapping")
    known = set(allowed) if allowed else {p for s in SUITES.values() for p in s.parameters()}
    unknown = sorted(set(section) - known)
    if unknown:
        raise ConfigError(f"parse_config failed ({key}): unknown keys {unknown}")
    return section


def _expand(item, index: int, manifolds: dict, degrees: list[int], grids: dict, defaults: dict) -> list[SuiteEntry]:
    if not isinstance(item, dict) or "suite" not in item:
        raise ConfigError(f"parse_config failed (suites[{index}]): each entry needs a 'suite' name")
    params = dict(item)
    suite = get_suite(params.pop("suite"))
    manifold = params.pop("manifold", None)
    label = params.pop("label", None)
    if suite.needs_manifold and manifold not in manifolds:
        raise ConfigError(f"parse_config failed (suites[{index}]): {suite.name} needs a manifold from 'manifolds', got {manifold!r}")
    if not suite.needs_manifold and manifold is not None:
        raise ConfigError(f"parse_config failed (suites[{index}]): {suite.name} takes no manifold")
    accepted = suite.parameters()
    grid = params.pop("time_grid", None)
    if grid is not None:
        if grid not in grids:
            raise ConfigError(f"parse_config failed (suites[{index}]): unknown time grid {grid!r}")
        params.setdefault("times", [grids[grid]["lo"], grids[grid]["hi"]])
        if "n_times" in accepted:
            params.setdefault("n_times", grids[grid]["n"])
    for key, value in defaults.items():
        if key in accepted:
            params.setdefault(key, value)
    check_params(suite, params)

    base = label or "_".join(p for p in (suite.name, manifold) if p)
    if "j" in accepted and "j" not in params:
        return [SuiteEntry(suite.name, f"{base}_j{j}", manifold, {**params, "j": j}) for j in degrees]
    return [SuiteEntry(suite.name, base, manifold, params)]


def parse_config(raw: dict, seed: int | None = None, output_dir=None) -> RunConfig:
    """Validated RunConfig; seed and output_dir override the file when given."""
    unknown = sorted(set(raw) - set(TOP_LEVEL))
    if unknown:
        raise ConfigError(f"parse_config failed: unknown top-level keys {unknown}")
    if seed is not None:
        raw = {**raw, "seed": seed}
    if "seed" not in raw:
        raise ConfigError("parse_config failed (seed): a master seed is required")
    seed = _int(raw, "seed", 0)
    workers = _int(raw, "workers", 1, default=config.DEFAULT_WORKERS)
    degrees = raw.get("degrees", [0, 1])
    if not degrees or not all(isinstance(j, int) and not isinstance(j, bool) and j >= 0 for j in degrees):
        raise ConfigError(f"parse_config failed (degrees): expected a nonempty list of degrees, got {degrees!r}")
    manifolds = _manifolds(raw)
    grids = _time_grids(raw)
    defaults = {**_defaults(raw, "tolerances"), **_defaults(raw, "monte_carlo", MC_KEYS)}
    suites = raw.get("suites")
    if not isinstance(suites, list) or not suites:
        raise ConfigError("parse_config failed (suites): expected a nonempty list")

    entries: list[SuiteEntry] = []
    for index, item in enumerate(suites):
        entries.extend(_expand(item, index, manifolds, degrees, grids, defaults))
    labels = [e.label for e in entries]
    duplicates = sorted({l for l in labels if labels.count(l) > 1})
    if duplicates:
        raise ConfigError(f"parse_config failed (suites): duplicate labels {duplicates}")

    return RunConfig(
        name=str(raw.get("name", "run")),
        seed=seed,
        output_dir=str(output_dir or raw.get("output_dir") or config.DEFAULT_OUTPUT_DIR),
        workers=workers,
        manifolds={name: raw["manifolds"][name] for name in manifolds},
        degrees=list(degrees),
        time_grids=grids,
        monte_carlo=raw.get("monte_carlo", {}),
        tolerances=raw.get("tolerances", {}),
        suites=entries,
    )


def select(cfg: RunConfig, names: list[str] | None) -> list[SuiteEntry]:
    if not names:
        return list(cfg.suites)
    for name in names:
        get_suite(name)
    return [e for e in cfg.suites if e.suite in names]


def _summary_entry(entry: SuiteEntry, report: FitReport | None, error: str | None = None) -> dict:
    if report is None:
        return {"label": entry.label, "suite": entry.suite, "manifold": entry.manifold or "", "passed": False,
                "max_ratio": float("nan"), "drift": float("nan"), "constants": {}, "error": error}
    return {"label": entry.label, "suite": entry.suite, "manifold": report.manifold, "passed": report.passed,
            "max_ratio": report.max_ratio, "drift": report.drift, "constants": report.constants, "error": None}


def run(cfg: RunConfig, names: list[str] | None = None) -> dict:
    """Execute the selected entries in order and write every report; returns the summary record.

    Suites that raise a HeatlabError are recorded as failed entries with the
    message; OSError while writing propagates.
    """
    entries = select(cfg, names)
    if not entries:
        raise ConfigError(f"run failed ({cfg.name}): the filter {names} selects no suite entries")
    manifolds = {name: manifold_from_spec(spec) for name, spec in cfg.manifolds.items()}
    out_dir = Path(cfg.output_dir)
    print(f"[harness] {cfg.name}: {len(entries)} entries, seed {cfg.seed}, workers {cfg.workers}, output {out_dir}")

    results = []
    for entry in entries:
        suite = SUITES[entry.suite]
        t0 = time.perf_counter()
        try:
            report = call_suite(suite, manifolds.get(entry.manifold), entry.params, cfg.seed, cfg.workers)
        except HeatlabError as exc:
            print(f"[harness] {entry.label}: ERROR {type(exc).__name__}: {exc}")
            results.append(_summary_entry(entry, None, f"{type(exc).__name__}: {exc}"))
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / f"{entry.label}.json").write_text(
                json.dumps(plain(results[-1]), indent=2, sort_keys=True) + "\n")
            continue
        write_report(entry.label, entry.suite, report, out_dir)
        status = "pass" if report.passed else "FAIL"
        print(f"[harness] {entry.label}: {status} max_ratio={report.max_ratio:.4g} drift={report.drift:.3g} "
              f"({time.perf_counter() - t0:.1f}s)")
        results.append(_summary_entry(entry, report))

    summary = summary_record(cfg.name, cfg.seed, results)
    write_summary(summary, out_dir)
    print(f"[harness] {cfg.name}: {summary['passed']}/{summary['total']} passed")
    return summary

