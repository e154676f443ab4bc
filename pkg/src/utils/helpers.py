"""
Helper functions for the spectral-colorings toolkit.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Dict, List, Sequence, Tuple, TypeVar

import numpy as np
import pandas as pd

T = TypeVar("T")


def format_duration(seconds: float) -> str:
    """Format duration in seconds to human readable format."""
    if seconds is None or not math.isfinite(seconds) or seconds == 0:
        return "0s"

    if seconds < 60:
        return f"{seconds:.1f}s"
    elif seconds < 3600:
        minutes = seconds / 60
        return f"{minutes:.1f}m"
    else:
        hours = seconds / 3600
        return f"{hours:.1f}h"


def to_jsonable(value: Any) -> Any:
    """
    Convert report values to plain JSON types.

    numpy scalars and arrays become Python numbers and lists, Fractions become
    floats, tuples become lists, and non-finite floats become None.

    Args:
        value: Any nested structure of dicts, sequences and numbers

    Returns:
        A structure json.dumps accepts
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating, Fraction)):
        number = float(value)
        return number if math.isfinite(number) else None
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return value


def write_table_csv(rows: List[Dict[str, Any]], file_path: str) -> int:
    """
    Write plot-ready rows to CSV.

    Args:
        rows: One dict per row; nested values are stored as their JSON-like repr
        file_path: Destination path

    Returns:
        Number of rows written
    """
    frame = pd.DataFrame([to_jsonable(row) for row in rows])
    for column in frame.columns:
        if frame[column].map(lambda x: isinstance(x, (list, dict))).any():
            frame[column] = frame[column].map(str)
    frame.to_csv(file_path, index=False)
    return len(frame)


def parallel_map(fn: Callable[..., T], items: Sequence, threads: int) -> List[T]:
    """Ordered map over items, on a thread pool when threads > 1."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def select_items(items: Sequence[T], budget: int, seed: int) -> Tuple[List[T], bool]:
    """
    All items when within budget, else a seeded sample kept in original order.

    Returns:
        Tuple of (selected items, whether sampling happened)
    """
    if budget <= 0 or len(items) <= budget:
        return list(items), False
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(len(items), size=budget, replace=False))
    return [items[int(a)] for a in chosen], True


def summarize_checks(passed: Sequence[bool]) -> str:
    """'PASS k/k' when every check passed, otherwise 'FAIL f/k'."""
    total = len(passed)
    failed = sum(1 for p in passed if not p)
    if failed:
        return f"FAIL {failed}/{total}"
    return f"PASS {total}/{total}"
