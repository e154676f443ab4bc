"""
Exact enumeration of proper list-colorings.

Every probability in the toolkit is derived from the integer counts produced
here: the total |Omega|, per-pair counts #{sigma : sigma_v = i} and the joint
table #{sigma : sigma_v = i, sigma_w = k} for all pairs of pairs, including
v = w where the table is diagonal.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Union

import numpy as np
from numba import njit

from .errors import (
    BadParamsError,
    ColorNotInListError,
    DegenerateMarginalError,
    NonExtendableError,
    TooLargeError,
    UnsatisfiableError,
    ZeroConditioningError,
)
from .graph_core import (
    InstanceCollection,
    InstanceLike,
    ListColoringInstance,
    PartialColoring,
    as_collection,
    condition,
)
from ..utils.config import ENUMERATION_CAP, OMEGA_CAP
from ..utils.logging_utils import log_computation

logger = logging.getLogger(__name__)


@njit(cache=True, nogil=True)
def _enumerate_kernel(n, q, indptr, indices, allowed, want_joint, store, pair_counts, joint_counts, out):
    """Iterative DFS in vertex order, colors ascending, with forward checking.

    blocked[u, c] counts assigned neighbors of u holding c; avail[u] counts the
    colors of u that are allowed and unblocked. A branch is abandoned as soon
    as some unassigned neighbor runs out of colors.
    """
    if n == 0:
        return 1
    width = q + 1
    blocked = np.zeros((n, width), dtype=np.int64)
    avail = np.zeros(n, dtype=np.int64)
    for v in range(n):
        for c in range(1, width):
            if allowed[v, c]:
                avail[v] += 1
        if avail[v] == 0:
            return 0
    assign = np.zeros(n, dtype=np.int64)
    next_color = np.ones(n, dtype=np.int64)
    total = 0
    depth = 0
    while depth >= 0:
        v = depth
        old = assign[v]
        if old != 0:
            for p in range(indptr[v], indptr[v + 1]):
                u = indices[p]
                if u > v:
                    blocked[u, old] -= 1
                    if blocked[u, old] == 0 and allowed[u, old]:
                        avail[u] += 1
            assign[v] = 0
        c = next_color[v]
        while c <= q and (not allowed[v, c] or blocked[v, c] > 0):
            c += 1
        if c > q:
            depth -= 1
            continue
        next_color[v] = c + 1
        assign[v] = c
        ok = True
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if u > v:
                if blocked[u, c] == 0 and allowed[u, c]:
                    avail[u] -= 1
                    if avail[u] == 0:
                        ok = False
                blocked[u, c] += 1
        if not ok:
            continue
        if v == n - 1:
            if store:
                for x in range(n):
                    out[total, x] = assign[x]
            else:
                for x in range(n):
                    pair_counts[x, assign[x]] += 1
                if want_joint:
                    for x in range(n):
                        row = x * width + assign[x]
                        for y in range(n):
                            joint_counts[row, y * width + assign[y]] += 1
            total += 1
            continue
        depth = v + 1
        next_color[depth] = 1
    return total


@dataclass(eq=False)
class ColoringCount:
    """Exact counts over Omega.

    per_pair has shape (n, q+1); per_quad, when present, has shape
    (n, q+1, n, q+1). Column 0 is unused.
    """

    total: int
    per_pair: np.ndarray
    per_quad: Optional[np.ndarray] = None

    def pair(self, v: int, i: int) -> int:
        return int(self.per_pair[v, i])

    def quad(self, v: int, i: int, w: int, k: int) -> int:
        if self.per_quad is None:
            raise BadParamsError("joint counts were not computed for this instance")
        return int(self.per_quad[v, i, w, k])


_COUNT_LIMIT = np.iinfo(np.int64).max


def _check_cap(instance: ListColoringInstance, cap: int):
    """
    Every count the kernel accumulates is at most the product of list sizes,
    so a product within cap keeps the int64 tables exact.

    Raises:
        BadParamsError: cap above the int64 range
        TooLargeError: product of list sizes above cap
    """
    if cap > _COUNT_LIMIT:
        raise BadParamsError(f"enumeration cap {cap:,} exceeds the int64 count range")
    product = 1
    for colors in instance.lists:
        product *= len(colors)
        if product > cap:
            raise TooLargeError(
                f"product of list sizes exceeds the enumeration cap {cap:,} "
                f"(n={instance.n}, q={instance.q})"
            )


def _run_kernel(instance: ListColoringInstance, allowed: np.ndarray, joint: bool, store: bool, out: np.ndarray):
    n, q = instance.n, instance.q
    indptr, indices = instance.graph.csr()
    width = q + 1
    pair_counts = np.zeros((max(n, 1), width), dtype=np.int64)
    if joint and not store:
        joint_counts = np.zeros((n * width, n * width), dtype=np.int64)
    else:
        joint_counts = np.zeros((1, 1), dtype=np.int64)
    total = _enumerate_kernel(
        n, q, indptr, indices, allowed, joint and not store, store, pair_counts, joint_counts, out
    )
    return int(total), pair_counts, joint_counts


def _split_on_first_vertex(instance: ListColoringInstance) -> List[np.ndarray]:
    base = instance.allowed_mask()
    masks = []
    for c in instance.lists[0]:
        mask = base.copy()
        mask[0, :] = False
        mask[0, c] = True
        masks.append(mask)
    return masks


@lru_cache(maxsize=4096)
def _tally(instance: ListColoringInstance, cap: int, joint: bool, threads: int) -> ColoringCount:
    _check_cap(instance, cap)
    n, width = instance.n, instance.q + 1
    empty_out = np.zeros((0, max(n, 1)), dtype=np.int64)
    if threads > 1 and n > 1 and len(instance.lists[0]) > 1:
        masks = _split_on_first_vertex(instance)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda m: _run_kernel(instance, m, joint, False, empty_out), masks))
        total = sum(p[0] for p in parts)
        pair_counts = sum(p[1] for p in parts)
        joint_counts = sum(p[2] for p in parts)
    else:
        total, pair_counts, joint_counts = _run_kernel(
            instance, np.ascontiguousarray(instance.allowed_mask()), joint, False, empty_out
        )
    per_quad = joint_counts.reshape(n, width, n, width) if joint and n > 0 else None
    pair_counts = pair_counts[:n]
    for arr in (pair_counts, per_quad):
        if arr is not None:
            arr.setflags(write=False)
    logger.debug(f"Enumerated instance n={n}, q={instance.q}: |Omega| = {total}")
    return ColoringCount(total=total, per_pair=pair_counts, per_quad=per_quad)


def count_colorings(
    instance: ListColoringInstance,
    cap: int = ENUMERATION_CAP,
    joint: bool = True,
    threads: int = 1,
) -> ColoringCount:
    """
    Exact counts of proper list-colorings.

    Args:
        instance: Instance to enumerate
        cap: Largest admissible product of list sizes
        joint: Also accumulate the joint pair-of-pairs table
        threads: Workers; the search is split on the colors of vertex 0

    Returns:
        ColoringCount

    Raises:
        TooLargeError: product of list sizes above cap
        UnsatisfiableError: no proper list-coloring exists
    """
    result = _tally(instance, int(cap), bool(joint), max(1, int(threads)))
    if result.total == 0:
        raise UnsatisfiableError(f"instance with n={instance.n}, q={instance.q} has no proper list-coloring")
    return result


def is_satisfiable(instance: ListColoringInstance, cap: int = ENUMERATION_CAP) -> bool:
    return _tally(instance, int(cap), False, 1).total > 0


@log_computation("enumerate_colorings", level=logging.DEBUG)
def enumerate_colorings(
    instance: ListColoringInstance, omega_cap: int = OMEGA_CAP, cap: int = ENUMERATION_CAP
) -> np.ndarray:
    """
    Materialize Omega as an (|Omega|, n) array in lexicographic order.

    Raises:
        TooLargeError: if |Omega| exceeds omega_cap
        UnsatisfiableError: if Omega is empty
    """
    return _enumerate_cached(instance, int(omega_cap), int(cap))


@lru_cache(maxsize=256)
def _enumerate_cached(instance: ListColoringInstance, omega_cap: int, cap: int) -> np.ndarray:
    total = count_colorings(instance, cap=cap, joint=False).total
    if total > omega_cap:
        raise TooLargeError(f"|Omega| = {total:,} exceeds the state cap {omega_cap:,}")
    out = np.zeros((total, max(instance.n, 1)), dtype=np.int64)
    stored, _, _ = _run_kernel(instance, np.ascontiguousarray(instance.allowed_mask()), False, True, out)
    if stored != total:
        raise RuntimeError(f"enumeration stored {stored} colorings, expected {total}")
    out = out[:, : instance.n]
    out.setflags(write=False)
    return out


def marginal(instance: ListColoringInstance, v: int, i: int, exact: bool = False) -> Union[float, Fraction]:
    """P(sigma_v = i); a Fraction when exact is set."""
    if i not in instance.lists[v]:
        raise ColorNotInListError(f"color {i} not in the list of vertex {v}")
    counts = count_colorings(instance, joint=False)
    if exact:
        return Fraction(counts.pair(v, i), counts.total)
    return counts.pair(v, i) / counts.total


def conditional_marginal(instance: ListColoringInstance, v: int, i: int, w: int, k: int) -> float:
    """
    P(sigma_w = k | sigma_v = i) from joint counts.

    Raises:
        ZeroConditioningError: if P(sigma_v = i) = 0
    """
    if w == v:
        raise BadParamsError("conditional marginals need two distinct vertices")
    if not 1 <= k <= instance.q:
        raise BadParamsError(f"color {k} outside 1..{instance.q}")
    counts = count_colorings(instance)
    pinned = counts.pair(v, i) if 1 <= i <= instance.q else 0
    if pinned == 0:
        raise ZeroConditioningError(f"P(sigma_{v} = {i}) = 0")
    return counts.quad(v, i, w, k) / pinned


def marginal_table(instance: ListColoringInstance) -> np.ndarray:
    """(n, q+1) table P[v, k] = P(sigma_v = k)."""
    return _marginal_table(instance)


@lru_cache(maxsize=4096)
def _marginal_table(instance: ListColoringInstance) -> np.ndarray:
    counts = count_colorings(instance, joint=False)
    table = counts.per_pair / counts.total
    table.setflags(write=False)
    return table


def conditional_table(instance: ListColoringInstance) -> np.ndarray:
    """
    (n, q+1, n, q+1) table C[v, i, w, k] = P(sigma_w = k | sigma_v = i).

    Rows with P(sigma_v = i) = 0 are zero. The block v = w is the identity on
    pinnable colors.
    """
    return _conditional_table(instance)


@lru_cache(maxsize=4096)
def _conditional_table(instance: ListColoringInstance) -> np.ndarray:
    counts = count_colorings(instance)
    pinned = counts.per_pair.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        table = counts.per_quad / pinned[:, :, None, None]
    table = np.where(pinned[:, :, None, None] > 0, table, 0.0)
    table.setflags(write=False)
    return table


def ratio_R(obj: InstanceLike, u: int) -> float:
    """
    max over c in L(u) of P(sigma_u = c) / P(sigma_u != c); over all satisfiable members for a collection.

    Raises:
        DegenerateMarginalError: if some marginal equals one
        UnsatisfiableError: if no member is satisfiable
    """
    best = None
    for member in as_collection(obj).members():
        if not is_satisfiable(member):
            continue
        probs = marginal_table(member)[u, list(member.lists[u])]
        top = float(probs.max())
        if top >= 1.0:
            raise DegenerateMarginalError(f"vertex {u} has a forced color in some member")
        value = top / (1.0 - top)
        best = value if best is None else max(best, value)
    if best is None:
        raise UnsatisfiableError("no satisfiable member in the collection")
    return best


def p_max(instance: ListColoringInstance, v: int) -> float:
    """Largest marginal of v."""
    return float(marginal_table(instance)[v, list(instance.lists[v])].max())


def is_extendable(instance: ListColoringInstance, partial: PartialColoring, cap: int = ENUMERATION_CAP) -> bool:
    """True iff some proper list-coloring agrees with the partial coloring."""
    try:
        conditioned = condition(instance, partial)
    except NonExtendableError:
        return False
    return is_satisfiable(conditioned, cap)


def sample_uniform_coloring(
    instance: ListColoringInstance, rng: np.random.Generator, omega_cap: int = OMEGA_CAP
) -> np.ndarray:
    """Exact uniform draw from Omega by indexing the enumeration."""
    states = enumerate_colorings(instance, omega_cap=omega_cap)
    return states[int(rng.integers(states.shape[0]))].copy()


def clear_caches():
    """Drop memoized counts; tests use this to bound memory."""
    for cached in (_tally, _enumerate_cached, _marginal_table, _conditional_table):
        cached.cache_clear()


__all__ = [
    "ColoringCount",
    "InstanceCollection",
    "clear_caches",
    "conditional_marginal",
    "conditional_table",
    "count_colorings",
    "enumerate_colorings",
    "is_extendable",
    "is_satisfiable",
    "marginal",
    "marginal_table",
    "p_max",
    "ratio_R",
    "sample_uniform_coloring",
]
