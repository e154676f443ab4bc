"""
The `spectral` and `bound` subcommands.
"""

import logging

from ..core.errors import BadParamsError
from ..core.spectral import (
    local_expansion_sweep,
    mixing_bound_theorem1,
    verify_glauber_gap,
    verify_theorem8,
)
from ..utils.config import NULL_SPACE_TOL, SPECTRAL_TOL, RunConfig
from ..utils.logging_utils import log_command_execution
from .common import (
    DELTA_Q_INSTANCE,
    PARAMETER_REGION,
    TRIANGLE_FREE,
    CommandOutcome,
    require_hypotheses,
    resolve_delta,
    resolve_instance,
)

logger = logging.getLogger(__name__)


def _walk_identity(config: RunConfig) -> CommandOutcome:
    instance = resolve_instance(config)
    tol = config.tol if config.tol is not None else SPECTRAL_TOL
    report = verify_theorem8(instance, tol=tol, null_tol=NULL_SPACE_TOL)
    return CommandOutcome(result={"instance": instance.describe(), "report": report}, checks=[report.passed])


def _sweep(config: RunConfig) -> CommandOutcome:
    instance = resolve_instance(config)
    require_hypotheses(config, instance, (TRIANGLE_FREE, DELTA_Q_INSTANCE, PARAMETER_REGION))
    report = local_expansion_sweep(
        instance,
        config.epsilon,
        budget=config.budget,
        seed=config.seed,
        delta=resolve_delta(config, instance),
        threads=config.threads,
        omega_cap=config.omega_cap,
        slack=config.slack,
    )
    table = [dict(row, epsilon=config.epsilon) for row in report.local_expansion_table]
    return CommandOutcome(result={"instance": instance.describe(), "report": report},
                          checks=[report.passed], table=table)


def _gap(config: RunConfig) -> CommandOutcome:
    instance = resolve_instance(config)
    report = verify_glauber_gap(instance, epsilon=config.epsilon, omega_cap=config.omega_cap,
                                max_steps=config.max_steps)
    return CommandOutcome(result={"instance": instance.describe(), "report": report}, checks=[report.passed])


def _bound(config: RunConfig) -> CommandOutcome:
    if config.input_path or config.generator:
        instance = resolve_instance(config)
        n, q, delta = instance.n, instance.q, resolve_delta(config, instance)
    else:
        if config.n is None or config.q is None or config.delta is None:
            raise BadParamsError("bound needs an instance or all of --n, --q and --delta")
        n, q, delta = config.n, config.q, config.delta
    bound = mixing_bound_theorem1(n, delta, q, config.epsilon)
    logger.info(f"Mixing bound exponent c = {bound.exponent:.4g} (log10 bound {bound.log10_bound:.4g})")
    return CommandOutcome(result={"bound": bound}, checks=[])


SPECTRAL_HANDLERS = {
    "thm8": _walk_identity,
    "sweep": _sweep,
    "gap": _gap,
    "bound": _bound,
}


@log_command_execution
def spectral_command(config: RunConfig) -> CommandOutcome:
    """Dispatch `spectral --check X`; `bound` is also reachable as its own subcommand."""
    if config.action not in SPECTRAL_HANDLERS:
        raise BadParamsError(f"unknown spectral check '{config.action}'")
    return SPECTRAL_HANDLERS[config.action](config)


@log_command_execution
def bound_command(config: RunConfig) -> CommandOutcome:
    return _bound(config)
