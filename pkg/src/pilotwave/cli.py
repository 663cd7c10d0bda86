"""Command line entry point.

    pilotwave run <scenario> [--config FILE] --out DIR [--seed N] [--trajectories K]
    pilotwave verify DIR

Exit status: 0 when every check passes, 1 when any check fails, 2 on a
configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import SCENARIOS, ConfigError, parse_config
from .output import OutputError, load_summary, recheck, write_outputs
from .scenarios import run_scenario

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("pilotwave")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pilotwave", description="Pilot-wave trajectory simulations")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write its outputs")
    run.add_argument("scenario", choices=SCENARIOS)
    run.add_argument("--config", type=Path, help="key=value config file")
    run.add_argument("--out", type=Path, required=True, help="output directory")
    run.add_argument("--seed", type=int, help="master seed (overrides config)")
    run.add_argument("--trajectories", type=int, help="ensemble size (overrides config)")
    run.add_argument("--no-figures", action="store_true", help="skip the PNG figures")

    verify = sub.add_parser("verify", help="re-check pass/fail flags in summary.json")
    verify.add_argument("directory", type=Path)
    return parser


def _report(verdicts: dict[str, bool]) -> int:
    for name, ok in verdicts.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if all(verdicts.values()) else EXIT_FAILED


def cmd_run(args) -> int:
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text, scenario=args.scenario)
        cfg = cfg.with_overrides(seed=args.seed, trajectories=args.trajectories)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG

    result = run_scenario(cfg)
    try:
        paths = write_outputs(result, args.out, figures=not args.no_figures)
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    for p in paths:
        log.info("wrote %s", p)
    return _report({k: c.passed for k, c in result.checks.items()})


def cmd_verify(args) -> int:
    try:
        summary = load_summary(args.directory)
        verdicts = recheck(summary)
    except (OutputError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return _report(verdicts)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "run":
        return cmd_run(args)
    return cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
