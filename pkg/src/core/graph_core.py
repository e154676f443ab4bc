"""
Graphs, list-coloring instances, conditioning, instance surgery and the
parameter region Lambda_eps.

Vertices are addressed by position 0..n-1 inside a graph; the position order
is the total order "<" used by instance surgery. Each graph also carries the
original label of every position, so a conditioned or vertex-deleted graph
still knows where its vertices came from. Positions and labels coincide for
graphs built from an edge list.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from .errors import (
    BadParamsError,
    ColorNotInListError,
    ColorOutOfRangeError,
    DuplicateEdgeError,
    EmptyListError,
    IsolatedVertexError,
    NonExtendableError,
    NotErgodicError,
    NotNeighborError,
    SelfLoopError,
)
from ..utils.config import ALPHA_STAR_BRACKET, ALPHA_STAR_ITERATIONS

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with sorted adjacency tuples."""

    n: int
    adjacency: Tuple[Tuple[int, ...], ...]
    labels: Tuple[int, ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(self.n)))
        if len(self.adjacency) != self.n or len(self.labels) != self.n:
            raise BadParamsError("adjacency and labels must have one entry per vertex")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        """
        Build a validated graph on vertices 0..n-1.

        Args:
            n: Vertex count
            edges: Pairs (u, v)

        Returns:
            Graph with sorted neighbor tuples

        Raises:
            SelfLoopError, DuplicateEdgeError, BadParamsError
        """
        if n < 0:
            raise BadParamsError(f"vertex count must be non-negative, got {n}")
        neighbors: List[set] = [set() for _ in range(n)]
        for edge in edges:
            if len(edge) != 2:
                raise BadParamsError(f"edge must have two endpoints: {list(edge)}")
            u, v = int(edge[0]), int(edge[1])
            if not (0 <= u < n and 0 <= v < n):
                raise BadParamsError(f"edge ({u}, {v}) outside vertex range 0..{n - 1}")
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u}")
            if v in neighbors[u]:
                raise DuplicateEdgeError(f"duplicate edge ({u}, {v})")
            neighbors[u].add(v)
            neighbors[v].add(u)
        return cls(n=n, adjacency=tuple(tuple(sorted(nb)) for nb in neighbors))

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def max_degree(self) -> int:
        return max((len(nb) for nb in self.adjacency), default=0)

    @property
    def edge_count(self) -> int:
        return sum(len(nb) for nb in self.adjacency) // 2

    def edges(self) -> List[Pair]:
        """Edges (u, v) with u < v in lexicographic order."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def index_of(self, label: int) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise BadParamsError(f"vertex label {label} not in graph") from None

    @cached_property
    def _label_index(self) -> Dict[int, int]:
        return {label: pos for pos, label in enumerate(self.labels)}

    def induced(self, keep: Sequence[int]) -> "Graph":
        """
        Induced subgraph on the given positions, order preserved.

        Args:
            keep: Positions to keep (any order; sorted internally)

        Returns:
            Graph whose labels are the kept vertices' labels
        """
        kept = sorted(set(keep))
        new_pos = {old: new for new, old in enumerate(kept)}
        adjacency = tuple(
            tuple(new_pos[u] for u in self.adjacency[old] if u in new_pos) for old in kept
        )
        return Graph(n=len(kept), adjacency=adjacency, labels=tuple(self.labels[old] for old in kept))

    def csr(self) -> Tuple[np.ndarray, np.ndarray]:
        """CSR arrays (indptr, indices) for compiled kernels."""
        return self._csr

    @cached_property
    def _csr(self) -> Tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(nb) for nb in self.adjacency])
        indices = np.fromiter(
            (u for nb in self.adjacency for u in nb), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, indices


@dataclass(frozen=True)
class ListColoringInstance:
    """A graph together with one sorted color list per vertex, colors in 1..q."""

    graph: Graph
    lists: Tuple[Tuple[int, ...], ...]
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise BadParamsError(f"palette size must be positive, got {self.q}")
        if len(self.lists) != self.graph.n:
            raise BadParamsError(f"expected {self.graph.n} lists, got {len(self.lists)}")
        for v, colors in enumerate(self.lists):
            if not colors:
                raise EmptyListError(f"vertex {self.graph.labels[v]} has an empty list")
            for c in colors:
                if not 1 <= c <= self.q:
                    raise ColorOutOfRangeError(f"color {c} at vertex {self.graph.labels[v]} outside 1..{self.q}")

    @property
    def n(self) -> int:
        return self.graph.n

    def list_of(self, v: int) -> Tuple[int, ...]:
        return self.lists[v]

    @property
    def max_list_size(self) -> int:
        return max((len(c) for c in self.lists), default=0)

    def pairs(self) -> List[Pair]:
        """The pair set U: every (v, i) with i in L(v), ordered by vertex then color."""
        return [(v, c) for v in range(self.n) for c in self.lists[v]]

    def allowed_mask(self) -> np.ndarray:
        """Boolean (n, q+1) table; column 0 is unused."""
        return self._allowed

    @cached_property
    def _allowed(self) -> np.ndarray:
        mask = np.zeros((self.n, self.q + 1), dtype=np.bool_)
        for v, colors in enumerate(self.lists):
            mask[v, list(colors)] = True
        mask.setflags(write=False)
        return mask

    def list_csr(self) -> Tuple[np.ndarray, np.ndarray]:
        """CSR arrays (list_ptr, list_vals) of the color lists."""
        return self._list_csr

    @cached_property
    def _list_csr(self) -> Tuple[np.ndarray, np.ndarray]:
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(c) for c in self.lists])
        vals = np.fromiter((c for colors in self.lists for c in colors), dtype=np.int64, count=int(ptr[-1]))
        return ptr, vals

    def is_glauber_valid(self) -> bool:
        """|L(v)| >= deg(v) + 2 everywhere, so every pair of colorings is connected by Glauber moves."""
        return all(len(self.lists[v]) >= self.graph.degree(v) + 2 for v in range(self.n))

    def degree_condition_holds(self) -> bool:
        """|L(v)| >= deg(v) + 1 everywhere, which guarantees satisfiability and positive marginals."""
        return all(len(self.lists[v]) >= self.graph.degree(v) + 1 for v in range(self.n))

    def require_glauber_valid(self):
        for v in range(self.n):
            if len(self.lists[v]) < self.graph.degree(v) + 2:
                raise NotErgodicError(
                    f"vertex {self.graph.labels[v]} has {len(self.lists[v])} colors but degree "
                    f"{self.graph.degree(v)}; Glauber dynamics needs at least degree + 2"
                )

    def is_proper(self, coloring: Sequence[int]) -> bool:
        """True iff the full assignment is a proper list-coloring."""
        if len(coloring) != self.n:
            return False
        for v in range(self.n):
            if coloring[v] not in self.lists[v]:
                return False
            if any(coloring[u] == coloring[v] for u in self.graph.adjacency[v]):
                return False
        return True

    def describe(self) -> Dict[str, int]:
        return {"n": self.n, "edges": self.graph.edge_count, "q": self.q, "max_degree": self.graph.max_degree}


@dataclass(frozen=True)
class PartialColoring:
    """An assignment vertex label -> color on a subset S of the vertices."""

    assignments: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "PartialColoring":
        return cls(assignments=tuple(sorted((int(v), int(c)) for v, c in mapping.items())))

    def as_dict(self) -> Dict[int, int]:
        return dict(self.assignments)

    def __len__(self) -> int:
        return len(self.assignments)


@dataclass(frozen=True)
class InstanceCollection:
    """Several list assignments on one shared graph."""

    graph: Graph
    lists_family: Tuple[Tuple[Tuple[int, ...], ...], ...]
    q: int

    @classmethod
    def single(cls, instance: ListColoringInstance) -> "InstanceCollection":
        return cls(graph=instance.graph, lists_family=(instance.lists,), q=instance.q)

    def members(self) -> Iterator[ListColoringInstance]:
        for lists in self.lists_family:
            yield ListColoringInstance(graph=self.graph, lists=lists, q=self.q)

    def __len__(self) -> int:
        return len(self.lists_family)


InstanceLike = Union[ListColoringInstance, InstanceCollection]


def as_collection(obj: InstanceLike) -> InstanceCollection:
    if isinstance(obj, InstanceCollection):
        return obj
    return InstanceCollection.single(obj)


@dataclass(frozen=True)
class RegionParams:
    """epsilon, alpha = (1+eps) alpha*, beta = 2 - alpha + alpha / (2 (alpha^2 - 1))."""

    epsilon: float
    alpha: float
    beta: float
    alpha_star: float = field(default=0.0)

    def threshold(self, delta: int) -> float:
        return self.alpha * delta + self.beta

    def contains(self, delta: int, q: int) -> bool:
        return delta >= 3 and q >= self.threshold(delta)


def build_instance(
    edge_list: Iterable[Sequence[int]],
    lists: Sequence[Iterable[int]],
    q: int,
    n: Optional[int] = None,
) -> ListColoringInstance:
    """
    Validate an edge list and color lists into an instance.

    Args:
        edge_list: Pairs over 0..n-1
        lists: One color collection per vertex
        q: Palette size
        n: Vertex count; defaults to len(lists)

    Returns:
        ListColoringInstance with sorted neighbor and color lists

    Raises:
        SelfLoopError, DuplicateEdgeError, EmptyListError, ColorOutOfRangeError
    """
    n = len(lists) if n is None else n
    graph = Graph.from_edges(n, edge_list)
    sorted_lists = []
    for v, colors in enumerate(lists):
        colors = sorted(set(int(c) for c in colors))
        sorted_lists.append(tuple(colors))
    return ListColoringInstance(graph=graph, lists=tuple(sorted_lists), q=int(q))


def is_triangle_free(graph: Graph) -> bool:
    """Neighbor-intersection scan over every edge."""
    neighbor_sets = [set(nb) for nb in graph.adjacency]
    for u in range(graph.n):
        for v in graph.adjacency[u]:
            if v > u and neighbor_sets[u] & neighbor_sets[v]:
                return False
    return True


def is_delta_q_instance(instance: ListColoringInstance, delta: int, q: int) -> bool:
    """
    Check max degree <= delta, lists within [q] and |L(v)| >= q - delta + deg(v).

    Raises:
        BadParamsError: if delta < 3 or q < delta + 2
    """
    if delta < 3 or q < delta + 2:
        raise BadParamsError(f"(Delta, q) = ({delta}, {q}) needs Delta >= 3 and q >= Delta + 2")
    if instance.graph.max_degree > delta:
        return False
    for v, colors in enumerate(instance.lists):
        if colors[-1] > q:
            return False
        if len(colors) < q - delta + instance.graph.degree(v):
            return False
    return True


def condition(instance: ListColoringInstance, partial: PartialColoring) -> ListColoringInstance:
    """
    Restrict to the unassigned vertices and remove colors used by assigned neighbors.

    Only local consistency is checked here; whether the partial coloring extends
    to a full coloring is decided by the oracle.

    Args:
        instance: Instance to condition
        partial: Assignments keyed by vertex label

    Returns:
        The conditioned instance on V minus S

    Raises:
        NonExtendableError: an assigned color is not in the list, an edge inside S
            is monochromatic, or some remaining list becomes empty
    """
    if not len(partial):
        return instance
    graph = instance.graph
    assigned: Dict[int, int] = {}
    for label, color in partial.assignments:
        pos = graph.index_of(label)
        if color not in instance.lists[pos]:
            raise NonExtendableError(f"color {color} not available at vertex {label}")
        assigned[pos] = color
    for pos, color in assigned.items():
        for u in graph.adjacency[pos]:
            if assigned.get(u) == color:
                raise NonExtendableError(
                    f"vertices {graph.labels[pos]} and {graph.labels[u]} share color {color}"
                )
    keep = [v for v in range(instance.n) if v not in assigned]
    new_lists = []
    for v in keep:
        blocked = {assigned[u] for u in graph.adjacency[v] if u in assigned}
        remaining = tuple(c for c in instance.lists[v] if c not in blocked)
        if not remaining:
            raise NonExtendableError(f"vertex {graph.labels[v]} has no color left after conditioning")
        new_lists.append(remaining)
    return ListColoringInstance(graph=graph.induced(keep), lists=tuple(new_lists), q=instance.q)


def _derived_lists(instance: ListColoringInstance, v: int, u: int, i: int, j: int) -> Tuple[Tuple[int, ...], ...]:
    lists = list(instance.lists)
    for w in instance.graph.adjacency[v]:
        if w < u:
            lists[w] = tuple(c for c in lists[w] if c != i)
        elif w > u:
            lists[w] = tuple(c for c in lists[w] if c != j)
    return tuple(lists[:v] + lists[v + 1:])


def derive_instance(instance: ListColoringInstance, v: int, u: int, i: int, j: int) -> ListColoringInstance:
    """
    Delete v; neighbors of v before u lose color i, neighbors after u lose color j.

    Args:
        instance: Source instance
        v: Vertex to delete
        u: A neighbor of v (its own list is unchanged)
        i, j: Distinct colors of L(v)

    Returns:
        The derived instance on G minus v

    Raises:
        NotNeighborError, ColorNotInListError, BadParamsError, EmptyListError
    """
    if not instance.graph.has_edge(v, u):
        raise NotNeighborError(f"{u} is not a neighbor of {v}")
    for c in (i, j):
        if c not in instance.lists[v]:
            raise ColorNotInListError(f"color {c} not in the list of vertex {v}")
    if i == j:
        raise BadParamsError("derived instances need two distinct colors")
    graph = instance.graph.induced([w for w in range(instance.n) if w != v])
    return ListColoringInstance(graph=graph, lists=_derived_lists(instance, v, u, i, j), q=instance.q)


def derive_collection(collection: InstanceLike, v: int, dedup: bool = True) -> InstanceCollection:
    """
    All derived instances over members, neighbors u of v and ordered color pairs of L(v).

    Members whose surgery empties a list have no colorings and are dropped.

    Raises:
        IsolatedVertexError: if v has no neighbors
    """
    collection = as_collection(collection)
    graph = collection.graph
    if graph.degree(v) == 0:
        raise IsolatedVertexError(f"vertex {v} is isolated")
    family: List[Tuple[Tuple[int, ...], ...]] = []
    seen = set()
    dropped = 0
    for lists in collection.lists_family:
        member = ListColoringInstance(graph=graph, lists=lists, q=collection.q)
        colors = member.lists[v]
        for u in graph.adjacency[v]:
            for i in colors:
                for j in colors:
                    if i == j:
                        continue
                    derived = _derived_lists(member, v, u, i, j)
                    if any(len(c) == 0 for c in derived):
                        dropped += 1
                        continue
                    if dedup:
                        if derived in seen:
                            continue
                        seen.add(derived)
                    family.append(derived)
    if dropped:
        logger.warning(f"derive_collection at vertex {v}: dropped {dropped} members with an empty list")
    sub_graph = graph.induced([w for w in range(graph.n) if w != v])
    return InstanceCollection(graph=sub_graph, lists_family=tuple(family), q=collection.q)


def derived_collection_size(collection: InstanceLike, v: int) -> int:
    """Member count before deduplication: sum over L of deg(v) |L(v)| (|L(v)| - 1)."""
    collection = as_collection(collection)
    deg = collection.graph.degree(v)
    return sum(deg * len(lists[v]) * (len(lists[v]) - 1) for lists in collection.lists_family)


@lru_cache(maxsize=1)
def alpha_star() -> float:
    """Root of exp(1/x) = x on [1.5, 2.0] by bisection."""
    low, high = ALPHA_STAR_BRACKET
    return float(
        optimize.bisect(
            lambda x: math.exp(1.0 / x) - x, low, high, xtol=1e-15, maxiter=ALPHA_STAR_ITERATIONS
        )
    )


def region_params(epsilon: float) -> RegionParams:
    """
    Region constants for a given epsilon.

    Raises:
        BadParamsError: if epsilon <= 0
    """
    if not epsilon > 0:
        raise BadParamsError(f"epsilon must be positive, got {epsilon}")
    a_star = alpha_star()
    alpha = (1.0 + epsilon) * a_star
    beta = 2.0 - alpha + alpha / (2.0 * (alpha * alpha - 1.0))
    return RegionParams(epsilon=float(epsilon), alpha=alpha, beta=beta, alpha_star=a_star)


def in_region(delta: int, q: int, epsilon: float) -> bool:
    return region_params(epsilon).contains(delta, q)


def vertex_after_deletion(w: int, v: int) -> int:
    """Position of w in G minus v."""
    if w == v:
        raise BadParamsError("the deleted vertex has no position")
    return w - 1 if w > v else w
