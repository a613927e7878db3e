"""Command-line interface.

``hijack-sim run`` executes the sweep described by a JSON config (or the
default grid) and writes ``results.csv``; ``hijack-sim curves`` reshapes a
results file into per-panel curve files for plotting. Exit codes: 0 on
success, 2 for config errors, 3 for runtime errors. Progress goes to
stderr; stdout stays silent unless --print-summary is set.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .engine import run_sweep
from .errors import ConfigError
from .results import (
    emit_curves,
    format_results,
    parse_config,
    read_results,
    rows_from_summaries,
    write_results,
)
from .rng import check_master_seed

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hijack-sim",
        description=(
            "Monte Carlo simulator of popularity-biased review systems "
            "under single-reviewer manipulation"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a single condition or full sweep")
    run.add_argument("--config", type=Path, default=None,
                     help="JSON config file (defaults to the built-in grid)")
    run.add_argument("--seed", type=int, default=None, metavar="U64",
                     help="override the master seed")
    run.add_argument("--out", type=Path, required=True,
                     help="output directory for results.csv")
    run.add_argument("--replicates", type=int, default=None,
                     help="override the replicate count per condition")
    run.add_argument("--threads", type=int, default=1,
                     help="worker processes for the sweep (default 1)")
    run.add_argument("--print-summary", action="store_true",
                     help="also print the results table to stdout")

    curves = sub.add_parser("curves", help="emit per-panel curve files from a results CSV")
    curves.add_argument("--results", type=Path, required=True,
                        help="results.csv produced by 'run'")
    curves.add_argument("--outcome", required=True,
                        choices=("delta_rmse", "best_demotion", "worst_promotion"))
    curves.add_argument("--out", type=Path, required=True,
                        help="output directory for curve files")
    return parser


def _read_config_text(path: Path | None) -> str:
    if path is None:
        return "{}"
    try:
        return path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err


def _cmd_run(args: argparse.Namespace) -> int:
    spec = parse_config(_read_config_text(args.config))
    if args.seed is not None:
        check_master_seed(args.seed)
        spec = replace(spec, master_seed=args.seed)
    if args.replicates is not None:
        if args.replicates < 1:
            raise ConfigError(f"replicates: must be at least 1, got {args.replicates}")
        spec = replace(spec, replicates=args.replicates)
    workers = max(1, args.threads)
    summaries = run_sweep(spec, workers=workers)
    rows = rows_from_summaries(summaries)
    args.out.mkdir(parents=True, exist_ok=True)
    path = write_results(rows, args.out / "results.csv")
    log.info("wrote %s", path)
    if args.print_summary:
        sys.stdout.write(format_results(rows))
    return 0


def _cmd_curves(args: argparse.Namespace) -> int:
    rows = read_results(args.results)
    paths = emit_curves(rows, args.outcome, args.out)
    for path in paths:
        log.info("wrote %s", path)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_curves(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # noqa: BLE001 - CLI boundary
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
