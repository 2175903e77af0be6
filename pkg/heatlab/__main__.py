"""CLI entry point: python -m heatlab

Usage:
  python -m heatlab list-suites
  python -m heatlab run configs/full_suite.json
  python -m heatlab run configs/full_suite.json --filter feynman_kac,bismut --out reports/fk --seed 7

Exit codes: 0 all entries passed, 1 some entry failed, 2 invalid config, 3 report writing failed.
"""

from __future__ import annotations

import argparse
import sys
import time

from heatlab.errors import ConfigError
from heatlab.harness.registry import list_suites
from heatlab.harness.runner import load_config, parse_config, run

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def _names(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return seed


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m heatlab",
        description="heatlab: verify heat-semigroup bounds on differential forms",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="Run the suite entries of a JSON config")
    run_parser.add_argument("config", help="Path to the run config")
    run_parser.add_argument("--filter", type=_names, default=None,
                            help="Comma-separated suite names to run (default: all entries)")
    run_parser.add_argument("--out", default=None, help="Output directory (overrides the config)")
    run_parser.add_argument("--seed", type=_seed, default=None, help="Master seed (overrides the config)")
    sub.add_parser("list-suites", help="List every verification suite")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "list-suites":
        for name, description in list_suites():
            print(f"{name:22s} {description}")
        return EXIT_OK

    t0 = time.time()
    try:
        cfg = parse_config(load_config(args.config), seed=args.seed, output_dir=args.out)
        print(f"[heatlab] Loaded config '{cfg.name}' ({len(cfg.suites)} entries)")
        summary = run(cfg, args.filter)
    except ConfigError as exc:
        print(f"[heatlab] Config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"[heatlab] Could not write reports: {exc}", file=sys.stderr)
        return EXIT_IO

    print(f"[heatlab] Total: {time.time() - t0:.1f}s")
    print(f"[heatlab] Output: {cfg.output_dir} ({summary['passed']}/{summary['total']} passed)")
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
