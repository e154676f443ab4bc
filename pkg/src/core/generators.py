"""
Graph families and list assignments used by the tests and the `gen` command.

Fixed families come from networkx and are relabelled to 0..n-1 in sorted
node order. Random graphs use a Philox generator seeded from the spec, so the
same spec always yields the same adjacency.
"""

import logging
import re
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import networkx as nx
import numpy as np

from .errors import BadParamsError
from .graph_core import Graph, ListColoringInstance, is_triangle_free

logger = logging.getLogger(__name__)

FAMILIES = (
    "star",
    "path",
    "cycle",
    "grid",
    "complete_bipartite",
    "random_bipartite",
    "random_triangle_free",
)


@dataclass(frozen=True)
class GeneratorSpec:
    """A graph family with its parameters and seed."""

    family: str
    params: Tuple[Tuple[str, Any], ...] = ()
    seed: int = 0

    def param(self, name: str, default: Any = None) -> Any:
        return dict(self.params).get(name, default)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": dict(self.params), "seed": self.seed}


def _from_networkx(graph: nx.Graph) -> Graph:
    relabelled = nx.convert_node_labels_to_integers(graph, ordering="sorted")
    edges = sorted((min(u, v), max(u, v)) for u, v in relabelled.edges())
    return Graph.from_edges(relabelled.number_of_nodes(), edges)


def _require_positive(**sizes: int):
    for name, value in sizes.items():
        if value < 1:
            raise BadParamsError(f"{name} must be at least 1, got {value}")


def star(delta: int) -> Graph:
    """Center 0 joined to leaves 1..delta."""
    if delta < 0:
        raise BadParamsError(f"star needs delta >= 0, got {delta}")
    return _from_networkx(nx.star_graph(delta))


def path(n: int) -> Graph:
    _require_positive(n=n)
    return _from_networkx(nx.path_graph(n))


def cycle(n: int) -> Graph:
    """Cycle on n >= 3 vertices; n = 3 is a triangle."""
    if n < 3:
        raise BadParamsError(f"cycle needs n >= 3, got {n}")
    if n == 3:
        logger.warning("cycle(3) is a triangle; it is not triangle-free")
    return _from_networkx(nx.cycle_graph(n))


def grid(rows: int, cols: int) -> Graph:
    """rows x cols lattice; vertex r*cols + c sits at (r, c)."""
    _require_positive(rows=rows, cols=cols)
    return _from_networkx(nx.grid_2d_graph(rows, cols))


def complete_bipartite(a: int, b: int) -> Graph:
    _require_positive(a=a, b=b)
    return _from_networkx(nx.complete_bipartite_graph(a, b))


def random_bipartite(a: int, b: int, p: float, seed: int = 0) -> Graph:
    """G(a, b, p) bipartite graph; part A is 0..a-1."""
    _require_positive(a=a, b=b)
    if not 0.0 <= p <= 1.0:
        raise BadParamsError(f"edge probability must lie in [0, 1], got {p}")
    return _from_networkx(nx.bipartite.random_graph(a, b, p, seed=seed))


def random_triangle_free(n: int, max_degree: int, edge_target: int, seed: int = 0) -> Graph:
    """
    Greedy rejection construction: shuffle all vertex pairs, then add a pair as an
    edge when both endpoints are below max_degree and it closes no triangle,
    until edge_target edges are placed or the candidates run out.

    This produces test inputs, not a uniform sample of triangle-free graphs.
    """
    _require_positive(n=n)
    if max_degree < 0 or edge_target < 0:
        raise BadParamsError("max_degree and edge_target must be nonnegative")
    rng = np.random.Generator(np.random.Philox(seed))
    candidates = [(u, v) for u in range(n) for v in range(u + 1, n)]
    order = rng.permutation(len(candidates))
    neighbors = [set() for _ in range(n)]
    edges = []
    for idx in order:
        if len(edges) >= edge_target:
            break
        u, v = candidates[int(idx)]
        if len(neighbors[u]) >= max_degree or len(neighbors[v]) >= max_degree:
            continue
        if neighbors[u] & neighbors[v]:
            continue
        neighbors[u].add(v)
        neighbors[v].add(u)
        edges.append((u, v))
    if len(edges) < edge_target:
        logger.warning(f"random_triangle_free placed {len(edges)} of {edge_target} requested edges")
    graph = Graph.from_edges(n, sorted(edges))
    if not is_triangle_free(graph):
        raise RuntimeError("random_triangle_free produced a triangle")
    return graph


def full_palette_instance(graph: Graph, q: int) -> ListColoringInstance:
    """Every vertex gets the list 1..q."""
    if q < 1:
        raise BadParamsError(f"q must be positive, got {q}")
    palette = tuple(range(1, q + 1))
    return ListColoringInstance(graph=graph, lists=tuple(palette for _ in range(graph.n)), q=q)


def random_lists_instance(graph: Graph, q: int, delta: int, seed: int = 0,
                          min_list_size: Optional[int] = None) -> ListColoringInstance:
    """
    Seeded random lists with |L(v)| = max(q - delta + deg(v), min_list_size), capped at q.

    Raises:
        BadParamsError: if the graph's max degree exceeds delta
    """
    if graph.max_degree > delta:
        raise BadParamsError(f"max degree {graph.max_degree} exceeds Delta = {delta}")
    if q < 1:
        raise BadParamsError(f"q must be positive, got {q}")
    rng = np.random.Generator(np.random.Philox(seed))
    floor = min_list_size or 1
    lists = []
    for v in range(graph.n):
        size = min(q, max(q - delta + graph.degree(v), floor))
        size = max(size, 1)
        chosen = rng.choice(np.arange(1, q + 1), size=size, replace=False)
        lists.append(tuple(sorted(int(c) for c in chosen)))
    return ListColoringInstance(graph=graph, lists=tuple(lists), q=q)


_SIZE_PAIR = re.compile(r"^(\d+)x(\d+)$")


def _parse_kv(text: str) -> Dict[str, str]:
    values = {}
    for part in filter(None, text.split(",")):
        if "=" not in part:
            raise BadParamsError(f"expected key=value, got '{part}'")
        key, value = part.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def parse_generator_spec(text: str, seed: int = 0) -> GeneratorSpec:
    """
    Parse "star:3", "path:5", "cycle:6", "grid:3x3", "complete_bipartite:2x3",
    "random_bipartite:4x4:p=0.5" or "random_triangle_free:n=8,max_degree=3,edges=10".
    """
    family, _, rest = text.strip().partition(":")
    if family not in FAMILIES:
        raise BadParamsError(f"unknown generator family '{family}'; expected one of {', '.join(FAMILIES)}")
    try:
        if family in ("star", "path", "cycle"):
            key = "delta" if family == "star" else "n"
            params = ((key, int(rest)),)
        elif family in ("grid", "complete_bipartite", "random_bipartite"):
            size, _, options = rest.partition(":")
            match = _SIZE_PAIR.match(size)
            if not match:
                raise BadParamsError(f"expected AxB size in '{text}'")
            params = (("a", int(match.group(1))), ("b", int(match.group(2))))
            if family == "random_bipartite":
                params += (("p", float(_parse_kv(options).get("p", "0.5"))),)
        else:
            kv = _parse_kv(rest)
            n = int(kv["n"])
            params = (
                ("n", n),
                ("max_degree", int(kv.get("max_degree", 3))),
                ("edges", int(kv.get("edges", n))),
            )
    except (KeyError, ValueError) as e:
        raise BadParamsError(f"malformed generator spec '{text}': {e}") from e
    return GeneratorSpec(family=family, params=params, seed=seed)


def build_graph(spec: GeneratorSpec) -> Graph:
    """Graph for a parsed spec."""
    p = spec.param
    if spec.family == "star":
        return star(p("delta"))
    if spec.family == "path":
        return path(p("n"))
    if spec.family == "cycle":
        return cycle(p("n"))
    if spec.family == "grid":
        return grid(p("a"), p("b"))
    if spec.family == "complete_bipartite":
        return complete_bipartite(p("a"), p("b"))
    if spec.family == "random_bipartite":
        return random_bipartite(p("a"), p("b"), p("p"), seed=spec.seed)
    return random_triangle_free(p("n"), p("max_degree"), p("edges"), seed=spec.seed)
