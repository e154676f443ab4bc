"""
Maps a resolved RunConfig to its command handler and turns the outcome into
a rendered report and an exit code.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

from ..core.errors import BadParamsError, ColoringError
from ..layouts.report_layout import build_report, render_report
from ..utils.config import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, RunConfig
from ..utils.data_loader import save_report
from ..utils.helpers import write_table_csv
from ..utils.logging_utils import log_error_with_context, log_run_config
from .common import CommandOutcome
from .instance_commands import gen_command, oracle_command
from .sampling_commands import couple_command, sample_command, tv_command
from .spectral_commands import bound_command, spectral_command
from .verify_commands import verify_command

logger = logging.getLogger(__name__)

COMMANDS: Dict[str, Callable[[RunConfig], CommandOutcome]] = {
    "gen": gen_command,
    "oracle": oracle_command,
    "verify": verify_command,
    "spectral": spectral_command,
    "sample": sample_command,
    "tv": tv_command,
    "couple": couple_command,
    "bound": bound_command,
}


@dataclass
class RunResult:
    exit_code: int
    report: Optional[Dict[str, Any]] = None
    text: Optional[str] = None
    error: Optional[str] = None


def _usage_error(config: RunConfig, error: Exception) -> RunResult:
    log_error_with_context(error, {"subcommand": config.subcommand, "action": config.action})
    return RunResult(exit_code=EXIT_USAGE, error=str(error))


def run(config: RunConfig) -> RunResult:
    """
    Execute one invocation.

    Returns:
        RunResult with exit code 0 when every check passed, 1 when any check
        failed, 2 on usage or input errors (report left empty, error set)
    """
    log_run_config(config)
    handler = COMMANDS.get(config.subcommand)
    try:
        if handler is None:
            raise BadParamsError(f"unknown subcommand '{config.subcommand}'")
        outcome = handler(config)
    except ColoringError as e:
        return _usage_error(config, e)

    report = build_report(config, outcome.result, outcome.checks)
    text = render_report(report)

    if config.out:
        success, message = save_report(config.out, text)
        if not success:
            return _usage_error(config, OSError(message))
        logger.info(message)

    if config.csv:
        if outcome.table:
            try:
                rows = write_table_csv(outcome.table, config.csv)
                logger.info(f"Wrote {rows} table rows to {config.csv}")
            except OSError as e:
                return _usage_error(config, e)
        else:
            logger.warning(f"'{report['command']}' produces no table; {config.csv} not written")

    logger.info(f"{report['command']}: {report['summary']}")
    return RunResult(exit_code=EXIT_PASS if report["passed"] else EXIT_FAIL, report=report, text=text)
