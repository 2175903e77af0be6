"""Report files: one JSON record, one CSV table and two-column series per suite entry, plus the run summary.

Everything written here is a pure function of the reports, so identical runs
give identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
from jinja2 import Environment, FileSystemLoader, StrictUndefined

from heatlab import config
from heatlab.models import FitReport

_templates = Environment(
    loader=FileSystemLoader(str(config.TEMPLATE_DIR)),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
)


def plain(value):
    """JSON-safe copy: numpy to builtins, non-finite floats to the strings inf, -inf, nan."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def report_record(label: str, suite: str, report: FitReport) -> dict:
    return plain({
        "label": label,
        "suite": suite,
        "name": report.name,
        "manifold": report.manifold,
        "form": report.spec.form,
        "grid": report.spec.grid,
        "constants": report.constants,
        "max_ratio": report.max_ratio,
        "drift": report.drift,
        "threshold": report.threshold,
        "passed": report.passed,
        "details": report.details,
        "series": sorted(report.series),
        "note": report.note,
    })


def _cell(value) -> str:
    value = plain(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def write_rows(rows: list[dict], path: Path) -> Path:
    """CSV over the union of row keys, in first-seen order."""
    columns: list[str] = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[k]) if k in row else "" for k in columns])
    return path


def write_series(data: np.ndarray, path: Path) -> Path:
    np.savetxt(path, np.atleast_2d(np.asarray(data, dtype=float)), fmt="%.17g")
    return path


def write_report(label: str, suite: str, report: FitReport, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{label}.json"
    json_path.write_text(json.dumps(report_record(label, suite, report), indent=2, sort_keys=True) + "\n")
    written = [json_path, write_rows(report.rows, out_dir / f"{label}.csv")]
    for name in sorted(report.series):
        written.append(write_series(report.series[name], out_dir / f"{label}__{name}.dat"))
    return written


def summary_record(name: str, seed: int, entries: list[dict]) -> dict:
    passed = sum(1 for e in entries if e["passed"])
    return plain({
        "name": name,
        "seed": seed,
        "total": len(entries),
        "passed": passed,
        "failed": len(entries) - passed,
        "entries": entries,
    })


def write_summary(summary: dict, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "summary.json"
    json_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    md_path = out_dir / "summary.md"
    md_path.write_text(_templates.get_template("summary.md.j2").render(summary=summary))
    return [json_path, md_path]
