"""Command-line entry point.

Exit codes: 0 success, 1 run error (including an unwritable output
directory), 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .config import EXPERIMENTS, ConfigError, default_config, validate_config
from .harness import run_suite

OUT_ENV = "ATCPG_OUT_DIR"
EXIT_OK, EXIT_RUN, EXIT_CONFIG = 0, 1, 2


def _seed_list(text: str) -> tuple:
    try:
        seeds = tuple(int(s) for s in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be integers, got {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="atcpg", description="Run pacing experiments on a virtual clock.")
    sub = p.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="YAML experiment config")
        sp.add_argument("--out", help=f"output directory (overrides ${OUT_ENV} and the config)")
        sp.add_argument("--seeds", type=_seed_list, help="comma-separated seeds, e.g. 1,2,3")
        sp.add_argument("--ticks", type=int, help="ticks per run")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    try:
        cfg = validate_config(args.config) if args.config else default_config(args.experiment)
        if cfg.experiment != args.experiment:
            raise ConfigError([f"{args.config}: config is for {cfg.experiment!r}, "
                               f"subcommand is {args.experiment!r}"])
        changes = {}
        if args.seeds is not None:
            changes["seeds"] = args.seeds
        if args.ticks is not None:
            if args.ticks < 1:
                raise ConfigError([f"--ticks must be >= 1, got {args.ticks}"])
            changes["ticks"] = args.ticks
        out = args.out or os.environ.get(OUT_ENV) or cfg.output_dir
        changes["output_dir"] = out
        cfg = dataclasses.replace(cfg, **changes)
    except ConfigError as e:
        for d in e.diagnostics:
            print(f"config error: {d}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        res = run_suite(cfg)
    except OSError as e:
        print(f"run error: cannot write output: {e}", file=sys.stderr)
        return EXIT_RUN
    except Exception as e:  # noqa: BLE001 - report and map to the run-error code
        print(f"run error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUN
    print((res.directory / "summary.csv").read_text(), end="")
    print(f"wrote {len(res.files)} files to {res.directory}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
