"""Command line interface.

    homlink simulate <preset> [--config FILE] [--seed U64] [--out DIR]
                              [--trials N] [--workers N]

Exit codes: 0 success, 2 configuration error, 1 runtime error.  Progress
goes to stderr; data files are the contract.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import PRESETS, ConfigError, parse_config
from .experiments import run_preset
from .output import emit_outputs

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homlink",
        description="Two-photon interference link simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="run an experiment preset")
    sim.add_argument("preset", choices=PRESETS)
    sim.add_argument("--config", help="INI config file (defaults otherwise)")
    sim.add_argument("--seed", type=int, default=None, help="master seed (u64)")
    sim.add_argument("--out", default=None, help="output directory")
    sim.add_argument("--trials", type=int, default=None,
                     help="override trial count")
    sim.add_argument("--workers", type=int, default=1,
                     help="worker threads (must not affect results)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            try:
                with open(args.config) as fh:
                    text = fh.read()
            except OSError as exc:
                print(f"error: cannot read config {args.config}: {exc}",
                      file=sys.stderr)
                return EXIT_CONFIG
        else:
            text = f"[experiment]\npreset = {args.preset}\n"
        cfg = parse_config(text)
        if cfg.preset != args.preset:
            raise ConfigError(
                f"config preset {cfg.preset!r} does not match the requested "
                f"preset {args.preset!r}")
        overrides = {}
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.out is not None:
            overrides["output_dir"] = args.out
        if overrides:
            cfg = replace(cfg, **overrides)
        if args.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {args.workers}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        print(f"running {cfg.preset} (trials={cfg.trials}, "
              f"seed={cfg.master_seed}, workers={args.workers})",
              file=sys.stderr)
        bundle = run_preset(cfg, workers=args.workers)
        written = emit_outputs(bundle, cfg.output_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for path in written:
        print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
