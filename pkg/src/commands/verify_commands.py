"""
The `verify` subcommand: numeric checks of the influence inequalities and
identities on one instance.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

from ..core.errors import BadParamsError
from ..core.graph_core import ListColoringInstance
from ..core.influence import (
    aggregate_recursion_reports,
    biased_recursion_reports,
    recursion_identity_reports,
    verify_entry_below_influence,
    verify_induced_collections,
    verify_jhat_bounds,
    verify_marginal_ratio_bounds,
    verify_one_step_bounds,
    verify_phi_region,
    verify_row_sum_bound,
    verify_total_bounds,
)
from ..core.spectral import verify_influence_eigenvalue_bound
from ..utils.config import GRID_MAX_DELTA, IDENTITY_TOL, VERIFY_CHECKS, RunConfig
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

FULL_HYPOTHESES = (TRIANGLE_FREE, DELTA_Q_INSTANCE, PARAMETER_REGION)

Reports = Tuple[list, List[dict]]


@dataclass(frozen=True)
class VerifyCheck:
    """A named check, the hypotheses it is stated under, and how to run it."""

    name: str
    hypotheses: Tuple[str, ...]
    run: Callable[[RunConfig, ListColoringInstance], Reports]
    needs_instance: bool = True


def _rows(reports: list) -> List[dict]:
    return [report.to_dict() for report in reports]


def _plain(fn):
    """Adapt a reports-only runner to the (reports, rows) shape."""
    def runner(config: RunConfig, instance: ListColoringInstance) -> Reports:
        reports = fn(config, instance)
        return reports, _rows(reports)
    return runner


def _phi_grid(config: RunConfig, instance: ListColoringInstance) -> Reports:
    report, grid = verify_phi_region(config.epsilon, max_delta=GRID_MAX_DELTA, slack=config.slack)
    return [report], grid


_CHECKS = [
    VerifyCheck("obs11", (), _plain(lambda c, x: [verify_entry_below_influence(x, c.slack)])),
    VerifyCheck("lemma14", (), _plain(lambda c, x: recursion_identity_reports(
        x, tol=c.tol if c.tol is not None else IDENTITY_TOL, budget=c.budget, seed=c.seed, threads=c.threads))),
    VerifyCheck("lemma17", (), _plain(lambda c, x: aggregate_recursion_reports(
        x, c.slack, budget=c.budget, seed=c.seed, threads=c.threads))),
    VerifyCheck("lemma18", FULL_HYPOTHESES, _plain(lambda c, x: verify_marginal_ratio_bounds(
        x, c.epsilon, delta=resolve_delta(c, x), slack=c.slack))),
    VerifyCheck("lemma22", FULL_HYPOTHESES, _plain(lambda c, x: verify_row_sum_bound(
        x, c.epsilon, delta=resolve_delta(c, x), slack=c.slack))),
    VerifyCheck("lemma25", (TRIANGLE_FREE, DELTA_Q_INSTANCE), _plain(lambda c, x: [
        r for r in verify_marginal_ratio_bounds(x, c.epsilon, delta=resolve_delta(c, x), slack=c.slack)
        if r.quantity == "ratio_vs_phi_bound"
    ])),
    VerifyCheck("lemma26", (), _phi_grid, needs_instance=False),
    VerifyCheck("thm9", FULL_HYPOTHESES, _plain(lambda c, x: [verify_influence_eigenvalue_bound(
        x, c.epsilon, delta=resolve_delta(c, x), slack=c.slack)])),
    VerifyCheck("thm19", FULL_HYPOTHESES, _plain(lambda c, x: [verify_total_bounds(x, c.epsilon, c.slack)])),
    VerifyCheck("biased", (), _plain(lambda c, x: biased_recursion_reports(
        x, c.slack, budget=c.budget, seed=c.seed, threads=c.threads))),
    VerifyCheck("biased-thm", FULL_HYPOTHESES, _plain(lambda c, x: [
        verify_total_bounds(x, c.epsilon, c.slack, biased=True)])),
    VerifyCheck("thm19-step", FULL_HYPOTHESES, _plain(lambda c, x: verify_one_step_bounds(
        x, c.epsilon, c.slack, budget=c.budget, seed=c.seed, threads=c.threads))),
    VerifyCheck("biased-step", FULL_HYPOTHESES, _plain(lambda c, x: verify_one_step_bounds(
        x, c.epsilon, c.slack, budget=c.budget, seed=c.seed, threads=c.threads, biased=True))),
    VerifyCheck("jk", (), _plain(lambda c, x: verify_jhat_bounds(x, c.slack))),
    VerifyCheck("induced", (DELTA_Q_INSTANCE,), _plain(lambda c, x: [
        verify_induced_collections(x, resolve_delta(c, x), x.q)])),
]

CHECKS: Dict[str, VerifyCheck] = {check.name: check for check in _CHECKS}

if tuple(CHECKS) != VERIFY_CHECKS:
    raise RuntimeError("verify registry is out of step with VERIFY_CHECKS")


@log_command_execution
def verify_command(config: RunConfig) -> CommandOutcome:
    """
    Run one named check and report every InfluenceReport it produced.

    Raises:
        BadParamsError: unknown check name
        HypothesisViolatedError: instance outside the check's hypotheses
    """
    if config.action not in CHECKS:
        raise BadParamsError(f"unknown check '{config.action}'; expected one of {', '.join(CHECKS)}")
    check = CHECKS[config.action]
    result = {"check": check.name, "epsilon": config.epsilon}
    instance = None
    if check.needs_instance:
        instance = resolve_instance(config)
        require_hypotheses(config, instance, check.hypotheses)
        result["instance"] = instance.describe()
        result["delta"] = resolve_delta(config, instance)

    reports, rows = check.run(config, instance)
    result["reports"] = reports
    failed = [r for r in reports if not r.passed]
    if failed:
        logger.warning(f"verify {check.name}: {len(failed)} of {len(reports)} reports failed")
    return CommandOutcome(result=result, checks=[bool(r.passed) for r in reports], table=rows)
