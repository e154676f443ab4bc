"""
Shared plumbing for the CLI command handlers: instance resolution,
hypothesis gates and the outcome type every handler returns.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from ..core.errors import BadParamsError, HypothesisViolatedError, InputError
from ..core.generators import (
    build_graph,
    full_palette_instance,
    parse_generator_spec,
    random_lists_instance,
)
from ..core.graph_core import ListColoringInstance, in_region, is_delta_q_instance, is_triangle_free
from ..utils.config import RunConfig
from ..utils.data_loader import InstanceLoader

logger = logging.getLogger(__name__)

TRIANGLE_FREE = "triangle-free"
DELTA_Q_INSTANCE = "delta-q-instance"
PARAMETER_REGION = "parameter-region"


@dataclass
class CommandOutcome:
    """
    What a handler hands back to the dispatcher.

    `checks` decides the verdict; None means the pass flags are collected from
    the result. `table` holds the plot-ready rows for --csv.
    """

    result: Any
    checks: Optional[List[bool]] = None
    table: List[Dict[str, Any]] = field(default_factory=list)


def resolve_instance(config: RunConfig) -> ListColoringInstance:
    """
    Instance named by --input or --gen.

    Raises:
        InputError: neither given, or the file could not be loaded
        BadParamsError: malformed generator spec or missing --q
    """
    if config.input_path:
        loader = InstanceLoader()
        success, message = loader.load(config.input_path, config.q)
        if not success:
            raise InputError(message)
        logger.info(message)
        return loader.instance

    if config.generator:
        if config.q is None:
            raise BadParamsError("--gen needs --q")
        spec = parse_generator_spec(config.generator, seed=config.seed)
        graph = build_graph(spec)
        if config.random_lists:
            delta = config.delta if config.delta is not None else max(3, graph.max_degree)
            return random_lists_instance(graph, config.q, delta, seed=config.seed,
                                         min_list_size=config.min_list_size)
        return full_palette_instance(graph, config.q)

    raise InputError("an instance is required: pass --input FILE or --gen SPEC")


def resolve_delta(config: RunConfig, instance: ListColoringInstance) -> int:
    """--delta when given, else max(3, max degree)."""
    if config.delta is not None:
        return config.delta
    return max(3, instance.graph.max_degree)


def require_hypotheses(config: RunConfig, instance: ListColoringInstance, hypotheses: Sequence[str]):
    """
    Refuse to run a check outside the hypotheses it is stated for.

    Raises:
        HypothesisViolatedError: naming the first hypothesis that fails
    """
    delta = resolve_delta(config, instance)
    for hypothesis in hypotheses:
        if hypothesis == TRIANGLE_FREE:
            holds = is_triangle_free(instance.graph)
        elif hypothesis == DELTA_Q_INSTANCE:
            holds = is_delta_q_instance(instance, delta, instance.q)
        elif hypothesis == PARAMETER_REGION:
            holds = in_region(delta, instance.q, config.epsilon)
        else:
            raise ValueError(f"unknown hypothesis '{hypothesis}'")
        if not holds:
            logger.warning(f"Hypothesis '{hypothesis}' fails (Delta={delta}, q={instance.q}, eps={config.epsilon})")
            raise HypothesisViolatedError(hypothesis)
