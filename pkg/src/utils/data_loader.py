"""
Loading and saving of list-coloring instances and reports.
"""

import json
import os
from typing import Any, Dict, Optional, Tuple

import pandas as pd

from ..core.errors import ColoringError
from ..core.graph_core import ListColoringInstance, build_instance
from .logging_utils import log_data_summary, log_file_operation


def instance_to_dict(instance: ListColoringInstance) -> Dict[str, Any]:
    """The JSON instance format: {"n", "q", "edges", "lists"}."""
    return {
        "n": instance.n,
        "q": instance.q,
        "edges": [list(e) for e in instance.graph.edges()],
        "lists": [list(colors) for colors in instance.lists],
    }


def instance_from_dict(data: Dict[str, Any]) -> ListColoringInstance:
    """
    Build an instance from the JSON format; a `gen` report envelope is accepted too.

    Raises:
        KeyError, TypeError, ValueError: malformed document
        ColoringError: invalid instance
    """
    if "result" in data and isinstance(data["result"], dict) and "instance" in data["result"]:
        data = data["result"]["instance"]
    q = int(data["q"])
    lists = data["lists"]
    n = int(data.get("n", len(lists)))
    if len(lists) != n:
        raise ValueError(f"expected {n} lists, got {len(lists)}")
    edges = [(int(u), int(v)) for u, v in data.get("edges", [])]
    return build_instance(edges, lists, q, n=n)


class InstanceLoader:
    """Handles loading and saving of instances and reports."""

    def __init__(self):
        self.instance: Optional[ListColoringInstance] = None
        self.source: Optional[str] = None
        self.instance_loaded = False

    @log_file_operation
    def load_json_instance(self, file_path: str) -> Tuple[bool, str]:
        """
        Load an instance from a JSON file.

        Args:
            file_path: Path to the .json file

        Returns:
            Tuple of (success: bool, message: str)
        """
        try:
            if not os.path.exists(file_path):
                return False, f"File not found: {file_path}"

            with open(file_path, "r", encoding="utf-8") as f:
                data = json.load(f)

            if not isinstance(data, dict):
                return False, "Instance file must contain a JSON object"

            missing = [key for key in ("q", "lists") if key not in data and "result" not in data]
            if missing:
                return False, f"Missing required keys: {', '.join(missing)}"

            return self._store(instance_from_dict(data), file_path)

        except json.JSONDecodeError as e:
            return False, f"Malformed JSON in {file_path}: {str(e)}"
        except ColoringError as e:
            return False, f"Invalid instance: {str(e)}"
        except Exception as e:
            return False, f"Error loading file: {str(e)}"

    @log_file_operation
    def load_edge_list(self, file_path: str, q: int, lists_path: Optional[str] = None) -> Tuple[bool, str]:
        """
        Load a whitespace-separated edge list; every vertex gets the full palette
        unless a lists file (one whitespace-separated list per line) is given.

        Args:
            file_path: Edge list, one "u v" pair per line, '#' comments allowed
            q: Palette size
            lists_path: Optional color lists, line v holding L(v)

        Returns:
            Tuple of (success: bool, message: str)
        """
        try:
            if not os.path.exists(file_path):
                return False, f"File not found: {file_path}"
            if q is None or q < 1:
                return False, "Edge-list input needs a positive --q"

            try:
                frame = pd.read_csv(file_path, sep=r"\s+", comment="#", header=None, dtype="int64")
            except pd.errors.EmptyDataError:
                frame = pd.DataFrame(columns=[0, 1], dtype="int64")
            if frame.shape[1] != 2:
                return False, f"Edge list must have two columns, found {frame.shape[1]}"
            edges = list(frame.itertuples(index=False, name=None))
            n = int(frame.values.max()) + 1 if len(frame) else 0

            if lists_path:
                with open(lists_path, "r", encoding="utf-8") as f:
                    lists = [[int(c) for c in line.split()] for line in f if line.strip()]
                n = max(n, len(lists))
                if len(lists) != n:
                    return False, f"Expected {n} color lists, found {len(lists)}"
            else:
                lists = [list(range(1, q + 1)) for _ in range(n)]

            return self._store(build_instance(edges, lists, q, n=n), file_path)

        except ColoringError as e:
            return False, f"Invalid instance: {str(e)}"
        except Exception as e:
            return False, f"Error loading edge list: {str(e)}"

    def load(self, file_path: str, q: Optional[int] = None) -> Tuple[bool, str]:
        """JSON for .json files, edge list otherwise."""
        if file_path.lower().endswith(".json"):
            return self.load_json_instance(file_path)
        return self.load_edge_list(file_path, q)

    def _store(self, instance: ListColoringInstance, file_path: str) -> Tuple[bool, str]:
        self.instance = instance
        self.source = file_path
        self.instance_loaded = True
        log_data_summary(instance, "load")
        return (
            True,
            f"Successfully loaded instance with {instance.n} vertices and {instance.graph.edge_count} edges",
        )

    def get_instance_summary(self) -> Dict:
        """Summary of the loaded instance."""
        if not self.instance_loaded:
            return {}
        summary = self.instance.describe()
        summary["source"] = self.source
        summary["glauber_valid"] = self.instance.is_glauber_valid()
        return summary


@log_file_operation
def save_report(file_path: str, text: str) -> Tuple[bool, str]:
    """
    Write a rendered report.

    Returns:
        Tuple of (success: bool, message: str)
    """
    try:
        directory = os.path.dirname(file_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(file_path, "w", encoding="utf-8") as f:
            f.write(text)
        return True, f"Report written to {file_path}"
    except Exception as e:
        return False, f"Error writing report: {str(e)}"
