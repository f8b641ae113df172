"""Command-line entry point.

Exit codes: 0 all checks pass, 1 numerical failure or failed check,
2 configuration error.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from ._quad import QuadratureError
from .transform import TailError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypharm",
        description="Desk-scale verification of radial harmonic analysis on H^n.")
    parser.add_argument("command", choices=harness.COMMANDS,
                        help="experiment to run")
    parser.add_argument("--config", metavar="PATH",
                        help="flat key=value configuration file")
    parser.add_argument("--out", metavar="DIR", default=None,
                        help="output directory for CSV reports (default: config out.dir)")
    parser.add_argument("--seed-grids", choices=("default", "fine"), default="default",
                        help="grid resolution preset; fine doubles every panel count")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = ""
        if args.config:
            try:
                with open(args.config) as fh:
                    raw = fh.read()
            except OSError as exc:
                raise harness.ConfigError(f"cannot read config: {exc}")
        cfg = harness.validate_config(raw)
        if args.seed_grids == "fine":
            cfg = harness.replace(cfg, grid_scale=2.0 * cfg.grid_scale)
        if args.out:
            cfg = harness.replace(cfg, out_dir=args.out)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        report = harness.run(args.command, cfg)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (harness.NumericalFailure, QuadratureError, TailError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    for row in report.rows:
        status = "pass" if row.passed else "FAIL"
        print(f"[{status}] {row.command}/{row.check} n={row.n} {row.param} "
              f"value={row.value:.6g}")
    for path in report.csv_paths:
        print(f"wrote {path}")
    if not report.aggregate_pass:
        print("aggregate: FAIL", file=sys.stderr)
        return 1
    print("aggregate: pass")
    return 0


if __name__ == "__main__":
    sys.exit(main())
