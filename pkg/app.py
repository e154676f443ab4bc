"""
Spectral Colorings command-line entry point.

Exact verification of the spectral-independence bounds for Glauber dynamics
on list-colorings, plus a seeded Glauber sampler:

    python app.py verify --check lemma18 --gen star:3 --q 7 --epsilon 0.1
"""

import argparse
import logging
import logging.handlers
import os
import sys
from datetime import datetime
from typing import List, Optional

from src.commands.dispatch import run
from src.utils.config import (
    APP_LOG_BACKUPS,
    APP_LOG_MAX_BYTES,
    DEFAULT_BUDGET,
    DEFAULT_CHAINS,
    DEFAULT_EPSILON,
    DEFAULT_MAX_STEPS,
    DEFAULT_SEED,
    DEFAULT_STEPS,
    DEFAULT_STRIDE,
    ENUMERATION_CAP,
    ERROR_LOG_BACKUPS,
    ERROR_LOG_MAX_BYTES,
    EXIT_PASS,
    EXIT_USAGE,
    INEQUALITY_SLACK,
    LOG_DIR,
    OMEGA_CAP,
    SPECTRAL_CHECKS,
    VERIFY_CHECKS,
    RunConfig,
    default_threads,
)


# Global variable to track if logging has been setup
_logging_initialized = False
_log_files = None


def setup_logging(logs_dir: str = LOG_DIR):
    """
    Configure the root logger once: console on stderr, rotating application
    and error logs in logs_dir. An empty logs_dir leaves out the files.
    """
    global _logging_initialized, _log_files

    if _logging_initialized:
        return _log_files

    date_str = datetime.now().strftime("%Y%m%d")

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)
    root_logger.handlers.clear()

    detailed_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s'
    )
    simple_formatter = logging.Formatter(
        '%(asctime)s - %(levelname)s - %(message)s'
    )

    # 1. Console handler; stdout is reserved for the JSON report
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.INFO)
    console_handler.setFormatter(simple_formatter)
    root_logger.addHandler(console_handler)

    # numba's compiler is chatty at DEBUG
    logging.getLogger("numba").setLevel(logging.WARNING)

    _log_files = (None, None)
    if logs_dir:
        os.makedirs(logs_dir, exist_ok=True)

        # 2. General application log file (rotating)
        app_log_file = os.path.join(logs_dir, f"spectral_colorings_{date_str}.log")
        app_file_handler = logging.handlers.RotatingFileHandler(
            app_log_file, maxBytes=APP_LOG_MAX_BYTES, backupCount=APP_LOG_BACKUPS
        )
        app_file_handler.setLevel(logging.DEBUG)
        app_file_handler.setFormatter(detailed_formatter)
        root_logger.addHandler(app_file_handler)

        # 3. Error-only log file
        error_log_file = os.path.join(logs_dir, f"spectral_colorings_errors_{date_str}.log")
        error_file_handler = logging.handlers.RotatingFileHandler(
            error_log_file, maxBytes=ERROR_LOG_MAX_BYTES, backupCount=ERROR_LOG_BACKUPS
        )
        error_file_handler.setLevel(logging.ERROR)
        error_file_handler.setFormatter(detailed_formatter)
        root_logger.addHandler(error_file_handler)

        _log_files = (app_log_file, error_log_file)

    _logging_initialized = True

    logging.debug("=" * 60)
    logging.debug(f"Spectral colorings run starting at {datetime.now()}")
    if logs_dir:
        logging.debug(f"Log files in: {os.path.abspath(logs_dir)}")
    logging.debug("=" * 60)

    return _log_files


def log_exception_handler(exc_type, exc_value, exc_traceback):
    """Custom exception handler to log uncaught exceptions."""
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return

    logging.error("Uncaught exception", exc_info=(exc_type, exc_value, exc_traceback))


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--input", dest="input_path", metavar="FILE", help="JSON instance or edge list")
    source.add_argument("--gen", dest="generator", metavar="SPEC", help="generator spec, e.g. grid:3x3")
    common.add_argument("--q", type=int, help="palette size (required with --gen and edge lists)")
    common.add_argument("--delta", type=int, help="Delta of the (Delta,q) hypotheses; default max(3, max degree)")
    common.add_argument("--n", type=int, help="vertex count for `bound` without an instance")
    common.add_argument("--random-lists", action="store_true", help="seeded random lists instead of full palettes")
    common.add_argument("--min-list-size", type=int)
    common.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="tuple cap for verification runs")
    common.add_argument("--omega-cap", type=int, default=OMEGA_CAP, help="largest enumerated state space")
    common.add_argument("--enum-cap", type=int, default=ENUMERATION_CAP, help="largest product of list sizes")
    common.add_argument("--threads", type=int, default=default_threads())
    common.add_argument("--tol", type=float, help="identity tolerance override")
    common.add_argument("--slack", type=float, default=INEQUALITY_SLACK, help="inequality slack")
    common.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    common.add_argument("--csv", metavar="FILE", help="write the run's plot-ready table")
    common.add_argument("--no-timestamp", dest="timestamp", action="store_false")
    common.add_argument("--log-dir", default=LOG_DIR, help="log directory; empty disables log files")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser; shared flags are accepted after the subcommand."""
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="spectral-colorings", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    gen = sub.add_parser("gen", parents=[common], help="emit a generated instance")
    gen.set_defaults(action=None)

    oracle = sub.add_parser("oracle", parents=[common], help="exact counts and marginals")
    oracle.add_argument("action", choices=("count", "marginals"))

    verify = sub.add_parser("verify", parents=[common], help="influence inequalities and identities")
    verify.add_argument("--check", dest="action", required=True, choices=VERIFY_CHECKS)

    spectral = sub.add_parser("spectral", parents=[common], help="spectral identity, sweep, gap and bound")
    spectral.add_argument("--check", dest="action", required=True, choices=SPECTRAL_CHECKS)
    spectral.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)

    sample = sub.add_parser("sample", parents=[common], help="run one Glauber chain")
    sample.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    sample.add_argument("--stride", type=int, default=DEFAULT_STRIDE)
    sample.add_argument("--start", choices=("smallest", "largest", "random"), default="smallest")
    sample.set_defaults(action=None)

    tv = sub.add_parser("tv", parents=[common], help="empirical TV distance from uniform")
    tv.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    tv.add_argument("--chains", type=int, default=DEFAULT_CHAINS)
    tv.add_argument("--stride", type=int, default=DEFAULT_STRIDE)
    tv.add_argument("--burn-in", type=int, default=0)
    tv.add_argument("--frequency-samples", type=int, default=0,
                    help="also test one-step transition frequencies with this many draws")
    tv.set_defaults(action=None)

    couple = sub.add_parser("couple", parents=[common], help="identity coupling diagnostic")
    couple.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    couple.set_defaults(action=None)

    bound = sub.add_parser("bound", parents=[common], help="mixing-time bound n^c")
    bound.set_defaults(action=None)

    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """Resolve parsed arguments into the RunConfig echoed by every report."""
    extra = []
    if args.subcommand == "tv":
        extra = [("burn_in", args.burn_in), ("frequency_samples", args.frequency_samples)]
    return RunConfig(
        subcommand=args.subcommand,
        action=args.action,
        input_path=args.input_path,
        generator=args.generator,
        q=args.q,
        delta=args.delta,
        n=args.n,
        epsilon=args.epsilon,
        seed=args.seed,
        budget=args.budget,
        omega_cap=args.omega_cap,
        enum_cap=args.enum_cap,
        threads=max(1, args.threads),
        tol=args.tol,
        slack=args.slack,
        steps=getattr(args, "steps", DEFAULT_STEPS),
        chains=getattr(args, "chains", DEFAULT_CHAINS),
        stride=getattr(args, "stride", DEFAULT_STRIDE),
        max_steps=getattr(args, "max_steps", DEFAULT_MAX_STEPS),
        start=getattr(args, "start", "smallest"),
        random_lists=args.random_lists,
        min_list_size=args.min_list_size,
        out=args.out,
        csv=args.csv,
        timestamp=args.timestamp,
        extra=tuple(extra),
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Parse, run and print; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PASS if not e.code else EXIT_USAGE

    setup_logging(args.log_dir)
    sys.excepthook = log_exception_handler

    config = build_config(args)
    result = run(config)
    if result.error:
        sys.stderr.write(f"error: {result.error}\n")
    elif not config.out:
        sys.stdout.write(result.text)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
