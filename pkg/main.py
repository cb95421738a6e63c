"""
Command-line entry point for bandspectra.

Usage:
    python main.py moments --lmax 3 --gamma 0.5 --exact
    python main.py simulate --preset narrow_band --dist normal --reps 5 --seed 7 --eig --out reports/fig
    python main.py trees --l 3 --json
    python main.py verify --suite full
    python main.py --env prod test -m "exact and not slow"

Exit codes: 0 ok, 1 verification failure, 2 usage, 3 budget, 4 numerical failure.
"""
import argparse
import sys
from fractions import Fraction
from typing import List, Optional

from src.core.errors import BudgetExceededError, ConvergenceError, EnumerationCapError
from src.core.utils.config_manager import ConfigManager
from src.core.utils.report_logger import ReportLogger
from src.core.utils.run_context import RunContext
from src.project.cli import commands
from src.project.cli.test_runner import run_tests

logger = ReportLogger()


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _nonnegative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bandspectra",
                                     description="Spectral moments of banded sample covariance matrices")
    parser.add_argument("--env", help="configuration environment (default: default_environment in config.yaml)")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="log at DEBUG on the console")
    verbosity.add_argument("--quiet", action="store_true", help="log warnings and errors only")
    subparsers = parser.add_subparsers(dest="command", required=True)

    moments = subparsers.add_parser("moments", help="limiting moment table")
    moments.add_argument("--lmax", type=_positive_int, required=True)
    scale = moments.add_mutually_exclusive_group(required=True)
    scale.add_argument("--gamma", type=_rational, help="gamma = lim d/n")
    scale.add_argument("--y", type=_rational, help="y = 2 * gamma")
    moments.add_argument("--exact", action="store_true", help="exact fractions instead of decimals")
    moments.add_argument("--out", help="also write moments.csv / moments.json here")
    moments.set_defaults(handler=commands.cmd_moments)

    simulate = subparsers.add_parser("simulate", help="Monte Carlo ensemble")
    simulate.add_argument("--preset", help="named (p, n, d) from config.yaml")
    simulate.add_argument("--p", type=_positive_int)
    simulate.add_argument("--n", type=_positive_int)
    simulate.add_argument("--d", type=_nonnegative_int)
    simulate.add_argument("--dist", choices=commands.distribution_names(), default="normal")
    simulate.add_argument("--reps", type=_positive_int, default=1)
    simulate.add_argument("--seed", type=_nonnegative_int, default=0)
    simulate.add_argument("--eig", action="store_true", help="compute eigenvalues and the histogram")
    simulate.add_argument("--lmax", type=_positive_int)
    simulate.add_argument("--bins", type=_positive_int)
    simulate.add_argument("--hutchinson", type=_positive_int, nargs="?", const=commands.CONFIGURED_PROBES,
                          metavar="PROBES",
                          help="add stochastic trace estimates (default probes: simulation.hutchinson_probes)")
    simulate.add_argument("--workers", type=_positive_int, help="replicate threads (default: config / BANDSPECTRA_THREADS)")
    simulate.add_argument("--backend", choices=("auto", "native", "lapack"))
    simulate.add_argument("--out", help="output directory (default: simulation.output_dir)")
    simulate.set_defaults(handler=commands.cmd_simulate)

    trees = subparsers.add_parser("trees", help="canonical trees and their contributions")
    trees.add_argument("--l", type=int, required=True)
    trees.add_argument("--json", action="store_true", help="one JSON object per line")
    trees.set_defaults(handler=commands.cmd_trees)

    verify = subparsers.add_parser("verify", help="oracle cross-checks")
    verify.add_argument("--suite", choices=("fast", "full"), default="fast")
    verify.set_defaults(handler=commands.cmd_verify)

    test = subparsers.add_parser("test", help="run pytest with arguments from config.yaml")
    test.add_argument("pytest_args", nargs=argparse.REMAINDER)
    test.set_defaults(handler=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    config_manager = ConfigManager(logger)
    context = RunContext(["bandspectra"] + list(argv))
    try:
        if args.env:
            config_manager.set_environment(args.env)
        context.set("environment", config_manager.get_current_environment())
        if args.verbose:
            logger.set_log_level("DEBUG")
        elif args.quiet:
            logger.set_log_level("WARNING")

        if args.command == "test":
            return run_tests(args.pytest_args, args.env or "")
        return args.handler(args, context)
    except EnumerationCapError as e:
        logger.log_error(e, args.command)
        return commands.EXIT_USAGE
    except BudgetExceededError as e:
        logger.log_error(e, args.command)
        return commands.EXIT_BUDGET
    except ConvergenceError as e:
        logger.log_error(e, args.command)
        return commands.EXIT_NUMERICAL
    except ValueError as e:
        logger.log_error(e, args.command)
        sys.stderr.write(f"{parser.prog} {args.command}: error: {e}\n")
        return commands.EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
