"""
Versioned JSON report envelope shared by every subcommand.
"""

import json
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, Optional

from ..utils.config import REPORT_INDENT, SCHEMA_VERSION, RunConfig
from ..utils.helpers import summarize_checks, to_jsonable


def collect_passes(result: Any) -> list:
    """Every `passed` flag found in the result, depth first."""
    flags = []
    if isinstance(result, dict):
        if isinstance(result.get("passed"), bool):
            flags.append(result["passed"])
        for key, value in result.items():
            if key != "passed":
                flags.extend(collect_passes(value))
    elif isinstance(result, (list, tuple)):
        for item in result:
            flags.extend(collect_passes(item))
    return flags


def build_report(config: RunConfig, result: Any, checks: Optional[Iterable[bool]] = None,
                 timestamp: Optional[datetime] = None) -> Dict[str, Any]:
    """
    Assemble the report document.

    Args:
        config: Resolved run configuration, echoed as the reproducibility header
        result: Command result (dataclasses are converted through to_dict)
        checks: Pass flags deciding the verdict; collected from the result when omitted
        timestamp: Creation time; left out when the config disables timestamps

    Returns:
        Dictionary with schema, command, config, result, passed and summary
    """
    body = to_jsonable(result)
    flags = list(checks) if checks is not None else collect_passes(body)
    report = {
        "schema": SCHEMA_VERSION,
        "command": " ".join(filter(None, (config.subcommand, config.action))),
        "config": to_jsonable(config.to_dict()),
        "result": body,
        "passed": all(flags),
        "summary": summarize_checks(flags),
    }
    if config.timestamp:
        moment = timestamp or datetime.now(timezone.utc)
        report["timestamp"] = moment.isoformat(timespec="seconds")
    return report


def render_report(report: Dict[str, Any]) -> str:
    """Sorted keys and a fixed indent, so identical runs render identically."""
    return json.dumps(report, sort_keys=True, indent=REPORT_INDENT, allow_nan=False) + "\n"
