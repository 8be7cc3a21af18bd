"""Command-line interface.

Subcommands: verify, map, zeros, selftest, sweep.  Exit codes: 0 pass,
1 computational failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, load_config
from .harness import EXIT_COMPONENT, EXIT_CONFIG, run_map, run_sweep, run_verify, run_zeros
from .selftest import run_selftest


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("BLASCHKE_LAB_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"BLASCHKE_LAB_THREADS is not an integer: {env!r}")
        if value < 1:
            raise ConfigError("BLASCHKE_LAB_THREADS must be at least 1")
        return value
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blaschke-lab",
        description="Weighted zero sums of analytic functions under growth envelopes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("verify", True), ("map", True), ("zeros", True),
                               ("sweep", True), ("selftest", False)):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=needs_config, help="path to the YAML config")
        sp.add_argument("--out", default="out", help="output directory (default: out)")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (fallback: BLASCHKE_LAB_THREADS, then 1)")
        sp.add_argument("--tol", type=float, default=None, help="override the config tolerance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = _threads(args)
        if args.command == "selftest":
            return run_selftest(seed=args.seed if args.seed is not None else 2025)
        config = load_config(args.config)
        if args.seed is not None:
            doc = dict(config.raw)
            doc["seed"] = args.seed
            config = type(config).from_dict(doc)
        if args.command == "verify":
            return run_verify(config, args.out, threads=threads)
        if args.command == "sweep":
            return run_sweep(config, args.out, threads=threads)
        if args.command == "map":
            return run_map(config, args.out)
        if args.command == "zeros":
            return run_zeros(config, args.out)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPONENT


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
