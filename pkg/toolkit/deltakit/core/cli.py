from __future__ import annotations

import argparse
import os


def add_runtime_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--debug",
        action="store_true",
        help="Enable verbose logging (sets DELTAKIT_LOG_LEVEL=DEBUG).",
    )
    parser.add_argument(
        "--limit-degree",
        type=int,
        metavar="N",
        help="Maximum total degree of input atoms (DELTAKIT_MAX_DEGREE).",
    )
    parser.add_argument(
        "--limit-vars",
        type=int,
        metavar="N",
        help="Maximum number of variables in one decomposition (DELTAKIT_MAX_VARS).",
    )
    parser.add_argument(
        "--timeout",
        type=float,
        metavar="SECONDS",
        help="Time budget per command or per suite instance (DELTAKIT_TIMEOUT_SECONDS).",
    )
    parser.add_argument(
        "--seed",
        type=int,
        metavar="N",
        help="Seed for generated batteries and sampled checks (DELTAKIT_SEED).",
    )
    parser.add_argument(
        "--no-cache",
        action="store_true",
        help="Disable in-process memo caches.",
    )


def apply_runtime_overrides(args: argparse.Namespace) -> None:
    if getattr(args, "debug", False):
        os.environ["DELTAKIT_LOG_LEVEL"] = "DEBUG"
    if getattr(args, "limit_degree", None) is not None:
        os.environ["DELTAKIT_MAX_DEGREE"] = str(args.limit_degree)
    if getattr(args, "limit_vars", None) is not None:
        os.environ["DELTAKIT_MAX_VARS"] = str(args.limit_vars)
    if getattr(args, "timeout", None) is not None:
        os.environ["DELTAKIT_TIMEOUT_SECONDS"] = str(args.timeout)
    if getattr(args, "seed", None) is not None:
        os.environ["DELTAKIT_SEED"] = str(args.seed)
    if getattr(args, "no_cache", False):
        os.environ["DELTAKIT_CACHE_ENABLED"] = "false"
