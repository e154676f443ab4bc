"""
The `gen` and `oracle` subcommands.
"""

import logging
from fractions import Fraction

from ..core.errors import BadParamsError
from ..core.graph_core import is_triangle_free
from ..core.oracle import count_colorings
from ..utils.config import RunConfig
from ..utils.data_loader import instance_to_dict
from ..utils.logging_utils import log_command_execution, log_data_summary
from .common import CommandOutcome, resolve_instance

logger = logging.getLogger(__name__)


@log_command_execution
def gen_command(config: RunConfig) -> CommandOutcome:
    """Generate an instance; the report's result.instance is loadable with --input."""
    if not config.generator:
        raise BadParamsError("gen needs --gen SPEC")
    instance = resolve_instance(config)
    log_data_summary(instance, "generation")
    result = {
        "instance": instance_to_dict(instance),
        "summary": instance.describe(),
        "triangle_free": is_triangle_free(instance.graph),
        "glauber_valid": instance.is_glauber_valid(),
        "random_lists": config.random_lists,
    }
    return CommandOutcome(result=result, checks=[])


def _count(config: RunConfig) -> CommandOutcome:
    instance = resolve_instance(config)
    counts = count_colorings(instance, cap=config.enum_cap, joint=False, threads=config.threads)
    logger.info(f"|Omega| = {counts.total:,}")
    result = {
        "instance": instance.describe(),
        "total": counts.total,
        "pair_counts": [
            {str(c): counts.pair(v, c) for c in instance.lists[v]} for v in range(instance.n)
        ],
    }
    return CommandOutcome(result=result, checks=[])


def _marginals(config: RunConfig) -> CommandOutcome:
    instance = resolve_instance(config)
    counts = count_colorings(instance, cap=config.enum_cap, joint=False, threads=config.threads)
    rows = []
    for v in range(instance.n):
        for c in instance.lists[v]:
            exact = Fraction(counts.pair(v, c), counts.total)
            rows.append({
                "v": v,
                "color": c,
                "probability": float(exact),
                "exact": f"{exact.numerator}/{exact.denominator}",
            })
    result = {"instance": instance.describe(), "total": counts.total, "marginals": rows}
    return CommandOutcome(result=result, checks=[], table=rows)


ORACLE_HANDLERS = {"count": _count, "marginals": _marginals}


@log_command_execution
def oracle_command(config: RunConfig) -> CommandOutcome:
    """`oracle count` or `oracle marginals`."""
    if config.action not in ORACLE_HANDLERS:
        raise BadParamsError(f"unknown oracle action '{config.action}'")
    return ORACLE_HANDLERS[config.action](config)
