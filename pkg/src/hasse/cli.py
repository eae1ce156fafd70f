"""Command-line entry point: ``hasse run`` and ``hasse check``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .runner import RunOptions, format_text, report_ok, run
from .scenario import ScenarioError, format_scenario, parse_scenario

EXIT_OK, EXIT_FAIL, EXIT_PARSE = 0, 1, 2


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"{path}: E000: cannot read file: {exc.strerror}", file=sys.stderr)
        return None
    try:
        return parse_scenario(text)
    except ScenarioError as exc:
        print(f"{path}:{exc}", file=sys.stderr)
        return None


def _use_color(stream) -> bool:
    env = os.environ.get("HASSE_COLOR")
    if env is not None:
        return env == "1"
    return stream.isatty()


def cmd_run(args) -> int:
    scenario = _load(args.file)
    if scenario is None:
        return EXIT_PARSE
    opts = RunOptions(seed=args.seed, parallel=args.parallel, fail_fast=args.fail_fast, timing=args.timing)
    report = run(scenario, opts)
    if args.format == "json":
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        sys.stdout.write(format_text(report, _use_color(sys.stdout)))
    return EXIT_OK if report_ok(report) else EXIT_FAIL


def cmd_check(args) -> int:
    scenario = _load(args.file)
    if scenario is None:
        return EXIT_PARSE
    if args.print:
        sys.stdout.write(format_scenario(scenario))
    else:
        n = len(scenario.declarations())
        print(f"{args.file}: ok ({n} declarations, {len(scenario.checks())} checks)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hasse", description="Exact checks for higher derivations and torsion.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run every check in a scenario file")
    p_run.add_argument("file")
    p_run.add_argument("--format", choices=("json", "text"), default="text")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--parallel", action="store_true", help="run checks concurrently")
    p_run.add_argument("--fail-fast", action="store_true", help="stop after the first failing check")
    p_run.add_argument("--timing", action="store_true", help="report elapsed time per check")
    p_run.set_defaults(func=cmd_run)

    p_check = sub.add_parser("check", help="parse and resolve a scenario without running it")
    p_check.add_argument("file")
    p_check.add_argument("--print", action="store_true", help="pretty-print the parsed scenario")
    p_check.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
