"""
Influence matrix M, maximum and biased influences, their totals, the Phi
function, and numerical checks of the influence recursions and bounds.

All quantities are read off the oracle's exact tables. For an instance the
array I[v, w, k] holds the maximum influence of v on (w, k); the diagonal
block w = v is kept (it equals one whenever k and some other color can be
pinned at v) because the recursions use it for u's influence on itself.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BadParamsError,
    ColorNotInListError,
    DegenerateMarginalError,
    EmptyListError,
    UnsatisfiableError,
    ZeroConditioningError,
)
from .graph_core import (
    InstanceCollection,
    InstanceLike,
    ListColoringInstance,
    alpha_star,
    as_collection,
    derive_collection,
    derive_instance,
    in_region,
    is_delta_q_instance,
    is_triangle_free,
    region_params,
    vertex_after_deletion,
)
from .oracle import conditional_table, is_satisfiable, marginal_table, ratio_R
from ..utils.config import GRID_MAX_DELTA, IDENTITY_TOL, INEQUALITY_SLACK
from ..utils.helpers import parallel_map, select_items
from ..utils.logging_utils import log_computation

logger = logging.getLogger(__name__)


@dataclass
class InfluenceReport:
    """One numeric check: value against bound, or an identity residual."""

    quantity: str
    value: float
    bound: float
    residual: float
    passed: bool
    context: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(eq=False)
class InfluenceMatrix:
    """M over the pair set U, rows and columns ordered by vertex then color."""

    index: Tuple[Tuple[int, int], ...]
    entries: np.ndarray
    n_vertices: int

    def position(self, v: int, i: int) -> Optional[int]:
        return self._positions.get((v, i))

    def __post_init__(self):
        self._positions = {pair: a for a, pair in enumerate(self.index)}

    def entry(self, v: int, i: int, w: int, k: int) -> float:
        """M((v,i),(w,k)), zero outside U."""
        a, b = self.position(v, i), self.position(w, k)
        if a is None or b is None:
            return 0.0
        return float(self.entries[a, b])

    def block_indicator(self, v: int) -> np.ndarray:
        """The vector 1_v over U."""
        return np.array([1.0 if x == v else 0.0 for x, _ in self.index])

    def row_l1(self) -> np.ndarray:
        return np.abs(self.entries).sum(axis=1)


@dataclass(eq=False)
class InfluenceArrays:
    """Maximum, biased and J-hat influences, each of shape (n, n, q+1)."""

    maximum: np.ndarray
    biased: np.ndarray
    jhat: np.ndarray


def pinnable(instance: ListColoringInstance) -> np.ndarray:
    """(n, q+1) mask of colors with positive marginal."""
    return marginal_table(instance) > 0


@lru_cache(maxsize=4096)
def _instance_arrays(instance: ListColoringInstance) -> InfluenceArrays:
    marginals = marginal_table(instance)
    cond = conditional_table(instance)
    pinned = marginals > 0
    width = marginals.shape[1]

    rows = pinned[:, :, None, None]
    hi = np.where(rows, cond, -np.inf).max(axis=1)
    lo = np.where(rows, cond, np.inf).min(axis=1)
    counts = pinned.sum(axis=1)
    maximum = np.where(counts[:, None, None] >= 2, hi - lo, 0.0)

    # pinned colors other than the target color k
    off_target = pinned[:, :, None] & ~np.eye(width, dtype=np.bool_)[None, :, :]
    rows_b = off_target[:, :, None, :]
    hi_b = np.where(rows_b, cond, -np.inf).max(axis=1)
    lo_b = np.where(rows_b, cond, np.inf).min(axis=1)
    counts_b = off_target.sum(axis=1)[:, None, :]
    biased = np.where(counts_b >= 2, hi_b - lo_b, 0.0)

    deviation = np.abs(cond - marginals[None, None, :, :])
    jhat = np.where(rows_b, deviation, -np.inf).max(axis=1)
    jhat = np.where(counts_b >= 1, jhat, 0.0)

    for arr in (maximum, biased, jhat):
        arr.setflags(write=False)
    return InfluenceArrays(maximum=maximum, biased=biased, jhat=jhat)


@lru_cache(maxsize=1024)
def _collection_arrays(collection: InstanceCollection) -> InfluenceArrays:
    result = None
    for member in collection.members():
        if not is_satisfiable(member):
            logger.debug("Skipping unsatisfiable member in influence maxima")
            continue
        arrays = _instance_arrays(member)
        if result is None:
            result = InfluenceArrays(arrays.maximum.copy(), arrays.biased.copy(), arrays.jhat.copy())
        else:
            np.maximum(result.maximum, arrays.maximum, out=result.maximum)
            np.maximum(result.biased, arrays.biased, out=result.biased)
            np.maximum(result.jhat, arrays.jhat, out=result.jhat)
    if result is None:
        raise UnsatisfiableError("no satisfiable member in the collection")
    return result


def influence_arrays(obj: InstanceLike) -> InfluenceArrays:
    """Influence arrays of an instance, or elementwise maxima over a collection."""
    if isinstance(obj, ListColoringInstance):
        return _instance_arrays(obj)
    if len(obj) == 1:
        return _instance_arrays(next(obj.members()))
    return _collection_arrays(obj)


@log_computation("influence_matrix", level=logging.DEBUG)
def influence_matrix(instance: ListColoringInstance) -> InfluenceMatrix:
    """
    M((v,i),(w,k)) = P(sigma_w = k | sigma_v = i) - P(sigma_w = k) for v != w, zero for v = w.

    Rows of colors with zero marginal are left at zero.
    """
    marginals = marginal_table(instance)
    cond = conditional_table(instance)
    full = cond - marginals[None, None, :, :]
    for v in range(instance.n):
        full[v, :, v, :] = 0.0
    pinned = marginals > 0
    if not np.all(pinned[instance.allowed_mask()]):
        logger.warning("influence_matrix: some listed colors have zero marginal; their rows are zero")
        full = np.where(pinned[:, :, None, None], full, 0.0)
    index = tuple(instance.pairs())
    vs = np.array([v for v, _ in index], dtype=np.int64)
    cs = np.array([c for _, c in index], dtype=np.int64)
    entries = full[vs, cs][:, vs, cs]
    return InfluenceMatrix(index=index, entries=entries, n_vertices=instance.n)


def max_influence(obj: InstanceLike, v: int, w: int, k: int) -> float:
    """max over pinned i, j of |P(w=k | v=i) - P(w=k | v=j)|, maximized over members."""
    return float(influence_arrays(obj).maximum[v, w, k])


def biased_influence(obj: InstanceLike, v: int, w: int, k: int) -> float:
    """As max_influence with i, j restricted to colors other than k."""
    return float(influence_arrays(obj).biased[v, w, k])


def jhat_influence(obj: InstanceLike, v: int, w: int, k: int) -> float:
    """max over pinned i != k of |P(w=k | v=i) - P(w=k)|."""
    return float(influence_arrays(obj).jhat[v, w, k])


def _totals(obj: InstanceLike, table: np.ndarray) -> np.ndarray:
    graph = as_collection(obj).graph
    per_target = table.sum(axis=2)
    np.fill_diagonal(per_target, 0.0)
    sums = per_target.sum(axis=1)
    degrees = np.array([graph.degree(v) for v in range(graph.n)], dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(degrees > 0, sums / np.maximum(degrees, 1.0), 0.0)


def total_influences(obj: InstanceLike) -> np.ndarray:
    """I*(v) for every vertex."""
    return _totals(obj, influence_arrays(obj).maximum)


def total_biased_influences(obj: InstanceLike) -> np.ndarray:
    """I-hat*(v) for every vertex."""
    return _totals(obj, influence_arrays(obj).biased)


def total_influence(obj: InstanceLike, v: int) -> float:
    return float(total_influences(obj)[v])


def total_biased_influence(obj: InstanceLike, v: int) -> float:
    return float(total_biased_influences(obj)[v])


def phi(delta: int, q: int) -> float:
    """
    ((q-2)/(Delta-1)) * [(1 - 1/(q-Delta+1))^(q-Delta+1)]^((Delta-1)/(q-2)).

    Raises:
        BadParamsError: unless Delta, q >= 3 and q >= Delta + 1
    """
    if delta < 3 or q < 3 or q < delta + 1:
        raise BadParamsError(f"Phi needs Delta, q >= 3 and q >= Delta + 1, got ({delta}, {q})")
    m = q - delta + 1
    exponent = m * math.log1p(-1.0 / m) * (delta - 1) / (q - 2)
    return (q - 2) / (delta - 1) * math.exp(exponent)


def _inequality(quantity: str, value: float, bound: float, slack: float, **context) -> InfluenceReport:
    return InfluenceReport(
        quantity=quantity,
        value=float(value),
        bound=float(bound),
        residual=float(value - bound),
        passed=bool(value <= bound + slack),
        context=context,
    )


def _worst(quantity: str, values: np.ndarray, bounds: np.ndarray, mask: np.ndarray, slack: float,
           labels: Sequence[str], **context) -> InfluenceReport:
    """Worst violation value - bound over the masked entries of same-shape arrays."""
    if not np.any(mask):
        return InfluenceReport(quantity, 0.0, 0.0, 0.0, True, {"checked": 0, **context})
    gap = np.where(mask, values - bounds, -np.inf)
    at = np.unravel_index(int(np.argmax(gap)), gap.shape)
    where = {name: int(x) for name, x in zip(labels, at)}
    return _inequality(quantity, values[at], bounds[at], slack, checked=int(mask.sum()), **where, **context)


# ---------------------------------------------------------------------------
# Recursion identity
# ---------------------------------------------------------------------------

def _derived_term(instance: ListColoringInstance, v: int, u: int, i: int, j: int, w: int, k: int) -> float:
    try:
        derived = derive_instance(instance, v, u, i, j)
    except EmptyListError as e:
        raise DegenerateMarginalError(f"derived instance at u={u} has an empty list") from e
    try:
        marg = marginal_table(derived)
        cond = conditional_table(derived)
    except UnsatisfiableError as e:
        raise DegenerateMarginalError(f"derived instance at u={u} has no coloring") from e
    u2, w2 = vertex_after_deletion(u, v), vertex_after_deletion(w, v)
    term = 0.0
    for color, sign in ((j, 1.0), (i, -1.0)):
        p = float(marg[u2, color])
        if p >= 1.0:
            raise DegenerateMarginalError(f"P(sigma_{u} != {color}) = 0 in the derived instance")
        if p == 0.0:
            continue
        # pinned difference; for w = u this is delta_{color,k} - P(sigma_u = k)
        diff = float(cond[u2, color, w2, k] - marg[w2, k])
        term += sign * (p / (1.0 - p)) * diff
    return term


def verify_recursion_identity(
    instance: ListColoringInstance, v: int, i: int, j: int, w: int, k: int, tol: float = IDENTITY_TOL
) -> InfluenceReport:
    """
    Compare P(w=k | v=i) - P(w=k | v=j) with the sum over neighbors u of v of
    r_j * D_u(j) - r_i * D_u(i), where r_c = P_u(u=c) / P_u(u!=c) and
    D_u(c) = P_u(w=k | u=c) - P_u(w=k) are taken in the derived instance for (u, i, j).

    Both orientations are compared; the report records which one matched.

    Raises:
        ColorNotInListError, BadParamsError, ZeroConditioningError, DegenerateMarginalError
    """
    for c in (i, j):
        if c not in instance.lists[v]:
            raise ColorNotInListError(f"color {c} not in the list of vertex {v}")
    if i == j or w == v:
        raise BadParamsError("the identity needs i != j and w != v")
    marg = marginal_table(instance)
    if marg[v, i] == 0 or marg[v, j] == 0:
        raise ZeroConditioningError(f"cannot pin vertex {v} to a color of zero marginal")
    cond = conditional_table(instance)
    lhs = float(cond[v, i, w, k] - cond[v, j, w, k])
    rhs = sum(_derived_term(instance, v, u, i, j, w, k) for u in instance.graph.adjacency[v])
    forward, backward = abs(lhs - rhs), abs(lhs + rhs)
    residual = min(forward, backward)
    return InfluenceReport(
        quantity="recursion_identity",
        value=lhs,
        bound=float(rhs),
        residual=residual,
        passed=bool(residual <= tol),
        context={
            "v": v, "i": i, "j": j, "w": w, "k": k,
            "orientation": "i_minus_j" if forward <= backward else "j_minus_i",
        },
    )


def recursion_identity_tuples(instance: ListColoringInstance) -> List[Tuple[int, int, int, int, int]]:
    pinned = pinnable(instance)
    tuples = []
    for v in range(instance.n):
        colors = [c for c in instance.lists[v] if pinned[v, c]]
        for i in colors:
            for j in colors:
                if i == j:
                    continue
                for w in range(instance.n):
                    if w == v:
                        continue
                    for k in range(1, instance.q + 1):
                        tuples.append((v, i, j, w, k))
    return tuples


@log_computation("recursion_identity")
def recursion_identity_reports(
    instance: ListColoringInstance,
    tol: float = IDENTITY_TOL,
    budget: int = 0,
    seed: int = 0,
    threads: int = 1,
) -> List[InfluenceReport]:
    """Identity over all (v, i, j, w, k), or a seeded sample of `budget` tuples."""
    tuples, sampled = select_items(recursion_identity_tuples(instance), budget, seed)
    if sampled:
        logger.info(f"Recursion identity: sampled {len(tuples)} tuples (seed {seed})")

    def check(t):
        try:
            return verify_recursion_identity(instance, *t, tol=tol)
        except DegenerateMarginalError as e:
            logger.warning(f"Skipping tuple {t}: {e}")
            return None

    reports = [r for r in parallel_map(check, tuples, threads) if r is not None]
    return reports


# ---------------------------------------------------------------------------
# Aggregate recursions
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class _NeighborTerms:
    positions: List[int]  # neighbors of v, as positions in G minus v
    ratios: np.ndarray  # R(u) in the derived collection
    degrees: np.ndarray  # degree of u in G minus v
    degenerate: bool


def _neighbor_terms(collection: InstanceCollection, v: int, derived: InstanceCollection) -> _NeighborTerms:
    positions = [vertex_after_deletion(u, v) for u in collection.graph.adjacency[v]]
    ratios = []
    degenerate = False
    for u2 in positions:
        try:
            ratios.append(ratio_R(derived, u2))
        except DegenerateMarginalError as e:
            logger.warning(f"Ratio at neighbor {u2} of {v} is unbounded: {e}")
            ratios.append(math.inf)
            degenerate = True
    degrees = np.array([derived.graph.degree(u2) for u2 in positions], dtype=np.float64)
    return _NeighborTerms(positions, np.array(ratios, dtype=np.float64), degrees, degenerate)


def _lift_to_parent(table: np.ndarray, v: int) -> np.ndarray:
    """Insert an empty target row at v so (u, w', k) tables line up with w in G."""
    return np.insert(table, v, 0.0, axis=1)


def verify_aggregate_recursion(
    collection: InstanceLike, v: int, slack: float = INEQUALITY_SLACK
) -> List[InfluenceReport]:
    """
    I*(v) <= max_u R(u) (deg_{G-v}(u) I*_v(u) + q), plus the pointwise form
    I[v -> (w,k)] <= sum_u R(u) I_v[u -> (w,k)] over all w != v and k.
    """
    collection = as_collection(collection)
    derived = derive_collection(collection, v)
    terms = _neighbor_terms(collection, v, derived)
    q = collection.q

    lhs = total_influence(collection, v)
    sub_totals = total_influences(derived)[terms.positions]
    with np.errstate(invalid="ignore"):
        rhs_per_u = terms.ratios * (terms.degrees * sub_totals + q)
    rhs = math.inf if terms.degenerate else float(np.max(rhs_per_u))
    aggregate = _inequality(
        "total_influence_recursion", lhs, rhs, slack,
        v=v, members=len(derived), degenerate=terms.degenerate,
    )

    parent = influence_arrays(collection).maximum[v]  # (w, k)
    child = influence_arrays(derived).maximum[terms.positions]  # (u, w', k)
    finite = np.isfinite(terms.ratios)
    pointwise_rhs = (terms.ratios[finite, None, None] * _lift_to_parent(child[finite], v)).sum(axis=0)
    if not np.all(finite):
        pointwise_rhs = np.full_like(parent, np.inf)
    mask = np.ones_like(parent, dtype=np.bool_)
    mask[v, :] = False
    mask[:, 0] = False
    pointwise = _worst("pointwise_influence_recursion", parent, pointwise_rhs, mask, slack, ("w", "k"), v=v)
    return [aggregate, pointwise]


def verify_biased_recursion(
    collection: InstanceLike, v: int, slack: float = INEQUALITY_SLACK
) -> List[InfluenceReport]:
    """
    I-hat*(v) <= max_u R(u) [deg(u) I-hat*_v(u) + R(u) (deg(u) I*_v(u) + q)], the
    pointwise form I-hat[v->(w,k)] <= sum_u R(u) (I-hat_v[u->(w,k)] + R(u) I_v[u->(w,k)]),
    and I-hat*(v) <= I*(v).
    """
    collection = as_collection(collection)
    derived = derive_collection(collection, v)
    terms = _neighbor_terms(collection, v, derived)
    q = collection.q

    lhs = total_biased_influence(collection, v)
    biased_totals = total_biased_influences(derived)[terms.positions]
    plain_totals = total_influences(derived)[terms.positions]
    r, d = terms.ratios, terms.degrees
    with np.errstate(invalid="ignore"):
        rhs = math.inf if terms.degenerate else float(np.max(r * (d * biased_totals + r * (d * plain_totals + q))))
    aggregate = _inequality(
        "total_biased_influence_recursion", lhs, rhs, slack,
        v=v, members=len(derived), degenerate=terms.degenerate,
    )

    sub = influence_arrays(derived)
    parent = influence_arrays(collection).biased[v]
    if np.all(np.isfinite(r)):
        inner = sub.biased[terms.positions] + r[:, None, None] * sub.maximum[terms.positions]
        pointwise_rhs = (r[:, None, None] * _lift_to_parent(inner, v)).sum(axis=0)
    else:
        pointwise_rhs = np.full_like(parent, np.inf)
    mask = np.ones_like(parent, dtype=np.bool_)
    mask[v, :] = False
    mask[:, 0] = False
    pointwise = _worst("pointwise_biased_recursion", parent, pointwise_rhs, mask, slack, ("w", "k"), v=v)

    dominated = _inequality(
        "biased_total_below_total", lhs, total_influence(collection, v), slack, v=v
    )
    return [aggregate, pointwise, dominated]


def _recursive_vertices(instance: ListColoringInstance, budget: int, seed: int) -> List[int]:
    candidates = [v for v in range(instance.n) if instance.graph.degree(v) >= 1]
    chosen, sampled = select_items(candidates, budget, seed)
    if sampled:
        logger.info(f"Sampled {len(chosen)} of {len(candidates)} vertices (seed {seed})")
    return chosen


@log_computation("aggregate_recursion")
def aggregate_recursion_reports(instance: ListColoringInstance, slack: float = INEQUALITY_SLACK,
                                budget: int = 0, seed: int = 0, threads: int = 1) -> List[InfluenceReport]:
    vertices = _recursive_vertices(instance, budget, seed)
    nested = parallel_map(lambda v: verify_aggregate_recursion(instance, v, slack), vertices, threads)
    return [r for group in nested for r in group]


@log_computation("biased_recursion")
def biased_recursion_reports(instance: ListColoringInstance, slack: float = INEQUALITY_SLACK,
                             budget: int = 0, seed: int = 0, threads: int = 1) -> List[InfluenceReport]:
    vertices = _recursive_vertices(instance, budget, seed)
    nested = parallel_map(lambda v: verify_biased_recursion(instance, v, slack), vertices, threads)
    return [r for group in nested for r in group]


def verify_one_step_bounds(
    instance: ListColoringInstance, epsilon: float, slack: float = INEQUALITY_SLACK,
    budget: int = 0, seed: int = 0, threads: int = 1, biased: bool = False,
) -> List[InfluenceReport]:
    """
    One step of the contraction behind the influence bounds:
    I*(v) <= max_u I*_v(u) / (1+eps) + 4, or for biased totals
    I-hat*(v) <= max_u I-hat*_v(u) / (1+eps) + (16/q)(1/eps + 1).
    """
    q = instance.q
    additive = (16.0 / q) * (1.0 / epsilon + 1.0) if biased else 4.0
    totals = total_biased_influences if biased else total_influences
    quantity = "biased_total_one_step" if biased else "total_influence_one_step"
    own = totals(instance)

    def check(v):
        derived = derive_collection(instance, v)
        positions = [vertex_after_deletion(u, v) for u in instance.graph.adjacency[v]]
        best = float(np.max(totals(derived)[positions]))
        return _inequality(quantity, own[v], best / (1.0 + epsilon) + additive, slack, v=v, epsilon=epsilon)

    return parallel_map(check, _recursive_vertices(instance, budget, seed), threads)


# ---------------------------------------------------------------------------
# Pointwise checks on a single instance
# ---------------------------------------------------------------------------

def _off_diagonal_mask(n: int, width: int) -> np.ndarray:
    mask = np.ones((n, n, width), dtype=np.bool_)
    for v in range(n):
        mask[v, v, :] = False
    mask[:, :, 0] = False
    return mask


def verify_entry_below_influence(instance: ListColoringInstance, slack: float = INEQUALITY_SLACK) -> InfluenceReport:
    """|M((v,i),(w,k))| <= I[v -> (w,k)] for every pinned (v,i), w != v and k."""
    marg = marginal_table(instance)
    cond = conditional_table(instance)
    entries = np.abs(cond - marg[None, None, :, :])
    bound = np.broadcast_to(influence_arrays(instance).maximum[:, None, :, :], entries.shape)
    n, width = marg.shape
    mask = (marg > 0)[:, :, None, None] & _off_diagonal_mask(n, width)[:, None, :, :]
    return _worst("entry_below_max_influence", entries, bound, mask, slack, ("v", "i", "w", "k"))


def verify_jhat_bounds(instance: ListColoringInstance, slack: float = INEQUALITY_SLACK) -> List[InfluenceReport]:
    """J-hat <= (1 - P(v)) I-hat + P(v) I, and I-hat <= I, pointwise over w != v."""
    arrays = influence_arrays(instance)
    n = instance.n
    p_top = np.array([marginal_table(instance)[v, list(instance.lists[v])].max() for v in range(n)])
    weighted = (1.0 - p_top)[:, None, None] * arrays.biased + p_top[:, None, None] * arrays.maximum
    mask = _off_diagonal_mask(n, instance.q + 1)
    return [
        _worst("jhat_below_weighted_influences", arrays.jhat, weighted, mask, slack, ("v", "w", "k")),
        _worst("biased_below_max_influence", arrays.biased, arrays.maximum, mask, slack, ("v", "w", "k")),
    ]


def _resolve_delta(instance: ListColoringInstance, delta: Optional[int]) -> int:
    return int(delta) if delta is not None else max(3, instance.graph.max_degree)


@log_computation("row_sum_bound")
def verify_row_sum_bound(
    instance: ListColoringInstance, epsilon: float, delta: Optional[int] = None,
    slack: float = INEQUALITY_SLACK,
) -> List[InfluenceReport]:
    """
    Row sums of |M| against 2 deg(v) (I-hat*(v) + P(v) I*(v)) and against
    64 (1/eps + 1)^2 Delta / q; worst row of each. Also checks that the mass of
    the k = i column is dominated by the other columns of the same row.
    """
    delta = _resolve_delta(instance, delta)
    q = instance.q
    if not (is_triangle_free(instance.graph) and in_region(delta, q, epsilon)):
        logger.warning(f"Row-sum bound requested outside its region (Delta={delta}, q={q}, eps={epsilon})")

    matrix = influence_matrix(instance)
    rows = matrix.row_l1()
    totals = total_influences(instance)
    biased_totals = total_biased_influences(instance)
    marg = marginal_table(instance)
    n = instance.n
    p_top = np.array([marg[v, list(instance.lists[v])].max() for v in range(n)])
    degrees = np.array([instance.graph.degree(v) for v in range(n)], dtype=np.float64)
    vertex_bound = 2.0 * degrees * (biased_totals + p_top * totals)
    pinned_rows = np.array([marg[v, i] > 0 for v, i in matrix.index])
    row_vertices = np.array([v for v, _ in matrix.index], dtype=np.int64)

    spectral_constant = 64.0 * (1.0 / epsilon + 1.0) ** 2 * delta / q
    by_totals = _worst(
        "row_sum_vs_influence_totals", rows, vertex_bound[row_vertices], pinned_rows, slack, ("row",),
    )
    by_constant = _worst(
        "row_sum_vs_spectral_constant", rows, np.full_like(rows, spectral_constant), pinned_rows, slack,
        ("row",), epsilon=epsilon, delta=delta,
    )
    for report in (by_totals, by_constant):
        row = report.context.pop("row", None)
        if row is not None:
            report.context["v"], report.context["i"] = matrix.index[row]
    # |M((v,i),(w,i))| summed over w against the off-target mass of the same row
    same_color = np.zeros(len(matrix.index))
    other = np.zeros(len(matrix.index))
    for a, (v, i) in enumerate(matrix.index):
        for b, (w, k) in enumerate(matrix.index):
            if w == v:
                continue
            if k == i:
                same_color[a] += abs(matrix.entries[a, b])
            else:
                other[a] += abs(matrix.entries[a, b])
    diagonal = _worst("same_color_mass_below_rest", same_color, other, pinned_rows, slack, ("row",))
    return [by_totals, by_constant, diagonal]


@log_computation("marginal_ratio_bounds")
def verify_marginal_ratio_bounds(
    instance: ListColoringInstance, epsilon: float, delta: Optional[int] = None,
    slack: float = INEQUALITY_SLACK,
) -> List[InfluenceReport]:
    """
    For vertices of degree at most Delta - 1 and c in L(u):
    ratio <= min(1/((1+eps) deg(u)), 4/q); ratio <= 1/(Phi(Delta,q) deg(u));
    P(sigma_u = c) <= 1/(|L(u)| - deg(u)) <= 1/(q - Delta); ratio <= 1/(q - Delta - 1).
    """
    delta = _resolve_delta(instance, delta)
    q = instance.q
    marg = marginal_table(instance)
    phi_value = phi(delta, q)
    rows_min, rows_phi, rows_crude, rows_chain, rows_ratio = [], [], [], [], []
    for u in range(instance.n):
        deg = instance.graph.degree(u)
        if deg > delta - 1:
            continue
        size = len(instance.lists[u])
        for c in instance.lists[u]:
            p = float(marg[u, c])
            ratio = math.inf if p >= 1.0 else p / (1.0 - p)
            min_bound = min(1.0 / ((1.0 + epsilon) * deg) if deg else math.inf, 4.0 / q)
            phi_bound = 1.0 / (phi_value * deg) if deg else math.inf
            crude = 1.0 / (size - deg) if size > deg else math.inf
            rows_min.append((ratio, min_bound, u, c))
            rows_phi.append((ratio, phi_bound, u, c))
            rows_crude.append((p, crude, u, c))
            rows_chain.append((crude, 1.0 / (q - delta), u, c))
            if q - delta > 1:
                rows_ratio.append((ratio, 1.0 / (q - delta - 1), u, c))

    def worst(quantity, rows, **extra):
        if not rows:
            return InfluenceReport(quantity, 0.0, 0.0, 0.0, True, {"checked": 0, **extra})
        value, bound, u, c = max(rows, key=lambda r: r[0] - r[1])
        return _inequality(quantity, value, bound, slack, u=u, c=c, checked=len(rows), **extra)

    return [
        worst("ratio_vs_min_bound", rows_min, epsilon=epsilon),
        worst("ratio_vs_phi_bound", rows_phi, phi=phi_value, delta=delta),
        worst("marginal_vs_list_slack", rows_crude),
        worst("list_slack_vs_palette_slack", rows_chain, delta=delta),
        worst("ratio_vs_palette_slack", rows_ratio, delta=delta),
    ]


def verify_phi_region(epsilon: float, max_delta: int = GRID_MAX_DELTA,
                      slack: float = INEQUALITY_SLACK) -> Tuple[InfluenceReport, List[Dict[str, Any]]]:
    """
    Phi(Delta, q) >= 1 + (1 + 1/alpha*) eps over Delta in 3..max_delta and
    ceil(alpha Delta + beta) <= q <= 3 Delta; an empty q-range is vacuous.

    Returns:
        Tuple of (report for the worst grid point, grid rows for export)
    """
    params = region_params(epsilon)
    target = 1.0 + (1.0 + 1.0 / params.alpha_star) * epsilon
    rows: List[Dict[str, Any]] = []
    for delta in range(3, max_delta + 1):
        for q in range(math.ceil(params.threshold(delta)), 3 * delta + 1):
            value = phi(delta, q)
            rows.append({"epsilon": epsilon, "delta": delta, "q": q, "phi": value, "bound": target,
                         "passed": bool(value >= target - slack)})
    if not rows:
        return InfluenceReport("phi_region_bound", 0.0, target, 0.0, True,
                               {"epsilon": epsilon, "checked": 0}), rows
    worst = min(rows, key=lambda r: r["phi"] - target)
    report = InfluenceReport(
        quantity="phi_region_bound",
        value=worst["phi"],
        bound=target,
        residual=float(target - worst["phi"]),
        passed=bool(worst["phi"] >= target - slack),
        context={"epsilon": epsilon, "delta": worst["delta"], "q": worst["q"], "checked": len(rows)},
    )
    return report, rows


def verify_total_bounds(instance: ListColoringInstance, epsilon: float,
                        slack: float = INEQUALITY_SLACK, biased: bool = False) -> InfluenceReport:
    """I*(v) <= 4 (1/eps + 1), or I-hat*(v) <= (16/q)(1/eps + 1)^2, at the worst vertex."""
    if biased:
        values = total_biased_influences(instance)
        bound = (16.0 / instance.q) * (1.0 / epsilon + 1.0) ** 2
        quantity = "total_biased_influence_bound"
    else:
        values = total_influences(instance)
        bound = 4.0 * (1.0 / epsilon + 1.0)
        quantity = "total_influence_bound"
    v = int(np.argmax(values)) if len(values) else 0
    value = float(values[v]) if len(values) else 0.0
    return _inequality(quantity, value, bound, slack, v=v, epsilon=epsilon)


def verify_induced_collections(instance: ListColoringInstance, delta: int, q: int) -> InfluenceReport:
    """Every derived collection of a (Delta, q)-instance consists of (Delta, q)-instances."""
    checked, failures = 0, []
    for v in range(instance.n):
        if instance.graph.degree(v) == 0:
            continue
        for member in derive_collection(instance, v).members():
            checked += 1
            if not is_delta_q_instance(member, delta, q):
                failures.append(v)
                break
    return InfluenceReport(
        quantity="derived_members_are_delta_q",
        value=float(len(failures)),
        bound=0.0,
        residual=float(len(failures)),
        passed=not failures,
        context={"checked": checked, "failing_vertices": failures, "delta": delta, "q": q},
    )


def clear_caches():
    _instance_arrays.cache_clear()
    _collection_arrays.cache_clear()


__all__ = [
    "InfluenceArrays",
    "InfluenceMatrix",
    "InfluenceReport",
    "aggregate_recursion_reports",
    "alpha_star",
    "biased_influence",
    "biased_recursion_reports",
    "influence_arrays",
    "influence_matrix",
    "jhat_influence",
    "max_influence",
    "phi",
    "recursion_identity_reports",
    "total_biased_influence",
    "total_biased_influences",
    "total_influence",
    "total_influences",
    "verify_aggregate_recursion",
    "verify_biased_recursion",
    "verify_entry_below_influence",
    "verify_induced_collections",
    "verify_jhat_bounds",
    "verify_marginal_ratio_bounds",
    "verify_one_step_bounds",
    "verify_phi_region",
    "verify_recursion_identity",
    "verify_row_sum_bound",
    "verify_total_bounds",
]
