"""
Spectral side of the toolkit: the pairwise walk on vertex-color pairs, the
eigenvalue identity between that walk and the influence matrix, the
local-expansion sweep over conditioned instances, and the exact Glauber
transition matrix with its spectral gap.
"""

import itertools
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import (
    BadParamsError,
    ComplexEigenvalueError,
    EigenSolverError,
    NonExtendableError,
    SingleVertexError,
    TooLargeError,
)
from .graph_core import (
    ListColoringInstance,
    PartialColoring,
    alpha_star,
    condition,
    in_region,
    is_triangle_free,
)
from .influence import InfluenceMatrix, influence_matrix
from .oracle import count_colorings, enumerate_colorings, is_extendable, marginal_table
from ..utils.config import (
    CONDUCTANCE_PAIR_LIMIT,
    DENSE_GLAUBER_LIMIT,
    EXACT_TV_LIMIT,
    IMAG_TOL,
    INEQUALITY_SLACK,
    MAX_REJECTION_TRIES,
    MIXING_THRESHOLD,
    NULL_SPACE_TOL,
    OMEGA_CAP,
    POWER_ITERATION_MAX_ITER,
    POWER_ITERATION_TOL,
    SPECTRAL_TOL,
)
from ..utils.helpers import parallel_map
from ..utils.logging_utils import log_computation

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class PairwiseWalk:
    """
    Non-lazy random walk on the pairs (v, i) with positive marginal.

    joint[(v,i),(w,k)] = P(sigma_v = i, sigma_w = k) for v != w and zero on the
    diagonal blocks; transition rows are joint rows over (n-1) P(sigma_v = i).
    """

    index: Tuple[Tuple[int, int], ...]
    joint: np.ndarray
    joint_counts: np.ndarray
    transition: np.ndarray
    stationary: np.ndarray
    n: int
    dropped_pairs: Tuple[Tuple[int, int], ...] = ()

    def is_reversible(self) -> bool:
        """Detailed balance at count level: the joint count table is symmetric."""
        return bool(np.array_equal(self.joint_counts, self.joint_counts.T))

    def row_sums(self) -> np.ndarray:
        return self.transition.sum(axis=1)


@dataclass
class SpectralReport:
    """Result of one spectral check."""

    check: str
    passed: bool
    lambda2_walk: Optional[float] = None
    lambda1_M: Optional[float] = None
    identity_residual: Optional[float] = None
    eigen_method: str = ""
    local_expansion_table: List[Dict[str, Any]] = field(default_factory=list)
    mixing_bound: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(eq=False)
class GlauberMatrix:
    """Exact Glauber transition matrix over the enumerated state space."""

    states: np.ndarray
    transition: scipy.sparse.csr_matrix
    n: int
    max_list_size: int

    @property
    def size(self) -> int:
        return int(self.states.shape[0])

    def dense(self) -> np.ndarray:
        return self.transition.toarray()


@dataclass
class MixingBound:
    """Closed-form mixing-time bound for q >= alpha Delta + 1 on triangle-free graphs."""

    n: int
    delta: int
    q: int
    epsilon: float
    alpha: float
    c_alpha: float
    exponent: float
    log10_bound: float
    constant: float
    k0: int
    log10_expansion_product_bound: float
    alpha_below_two: bool
    q_at_most_two_delta: bool
    constant_within_c_alpha: bool

    @property
    def bound(self) -> float:
        """n^c, or inf when it overflows a float."""
        try:
            return float(self.n) ** self.exponent
        except OverflowError:
            return math.inf

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["bound"] = self.bound
        return data


# ---------------------------------------------------------------------------
# Pairwise walk and the influence matrix spectrum
# ---------------------------------------------------------------------------

def build_pairwise_walk(instance: ListColoringInstance) -> PairwiseWalk:
    """
    Build the walk from exact joint counts.

    Raises:
        SingleVertexError: for n < 2
        UnsatisfiableError, TooLargeError: from the oracle
    """
    n = instance.n
    if n < 2:
        raise SingleVertexError("the pairwise walk needs at least two vertices")
    counts = count_colorings(instance)
    pairs = instance.pairs()
    index = tuple((v, i) for v, i in pairs if counts.per_pair[v, i] > 0)
    dropped = tuple((v, i) for v, i in pairs if counts.per_pair[v, i] == 0)
    if dropped:
        logger.debug(f"Pairwise walk drops {len(dropped)} pairs with zero marginal")

    vs = np.array([v for v, _ in index], dtype=np.int64)
    cs = np.array([c for _, c in index], dtype=np.int64)
    joint_counts = np.array(counts.per_quad[vs, cs][:, vs, cs], dtype=np.int64)
    joint_counts[vs[:, None] == vs[None, :]] = 0
    pinned = counts.per_pair[vs, cs].astype(np.float64)

    joint = joint_counts / counts.total
    transition = joint_counts / ((n - 1) * pinned[:, None])
    stationary = pinned / counts.total / n
    return PairwiseWalk(
        index=index,
        joint=joint,
        joint_counts=joint_counts,
        transition=transition,
        stationary=stationary,
        n=n,
        dropped_pairs=dropped,
    )


def _symmetrized(walk: PairwiseWalk) -> np.ndarray:
    root = np.sqrt(walk.stationary)
    a = root[:, None] * walk.transition / root[None, :]
    return (a + a.T) / 2.0


def walk_spectrum(walk: PairwiseWalk) -> np.ndarray:
    """All eigenvalues of the walk in non-increasing order."""
    try:
        values = scipy.linalg.eigh(_symmetrized(walk), eigvals_only=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenSolverError(f"symmetric eigen-solve failed: {e}") from e
    return values[::-1]


def second_eigenvalue_walk(walk: PairwiseWalk) -> float:
    """lambda_2 of the walk via D^(1/2) P D^(-1/2)."""
    values = walk_spectrum(walk)
    if values.size < 2:
        raise EigenSolverError("walk has fewer than two states")
    return float(values[1])


def _matrix_of(matrix: Union[InfluenceMatrix, np.ndarray]) -> np.ndarray:
    return matrix.entries if isinstance(matrix, InfluenceMatrix) else np.asarray(matrix, dtype=np.float64)


def influence_spectrum(matrix: Union[InfluenceMatrix, np.ndarray], imag_tol: float = IMAG_TOL) -> np.ndarray:
    """
    Real eigenvalues of M, non-increasing.

    Raises:
        ComplexEigenvalueError: if some imaginary part exceeds imag_tol
    """
    entries = _matrix_of(matrix)
    if entries.size == 0:
        return np.zeros(0)
    try:
        values = scipy.linalg.eigvals(entries)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenSolverError(f"general eigen-solve failed: {e}") from e
    worst_imag = float(np.max(np.abs(values.imag)))
    if worst_imag > imag_tol:
        raise ComplexEigenvalueError(f"eigenvalue with imaginary part {worst_imag:.3e} in M")
    return np.sort(values.real)[::-1]


def top_eigenvalue_influence(matrix: Union[InfluenceMatrix, np.ndarray], imag_tol: float = IMAG_TOL) -> float:
    """lambda_1(M) from a general dense eigen-solve; 0 for an empty matrix."""
    values = influence_spectrum(matrix, imag_tol)
    return float(values[0]) if values.size else 0.0


def power_iteration_top_eigenvalue(
    matrix: InfluenceMatrix,
    marginals: np.ndarray,
    tol: float = POWER_ITERATION_TOL,
    max_iter: int = POWER_ITERATION_MAX_ITER,
    seed: int = 0,
) -> Tuple[float, bool]:
    """
    lambda_1(M) by power iteration, independent of any eigen-solver.

    Iterates M + s I with s the largest row L1 norm, restricted to the subspace
    annihilated by the left null vectors of M (the normalized marginals of
    each vertex block). The n-dimensional block-constant null space is thereby
    excluded, and 0 is added back as a candidate.

    Returns:
        Tuple of (estimate, converged)
    """
    entries = matrix.entries
    size = entries.shape[0]
    if size == 0:
        return 0.0, True
    blocks = np.array([v for v, _ in matrix.index], dtype=np.int64)
    weights = np.array([marginals[v, i] for v, i in matrix.index], dtype=np.float64)
    totals = np.bincount(blocks, weights=weights)
    weights = weights / totals[blocks]

    def project(z: np.ndarray) -> np.ndarray:
        return z - np.bincount(blocks, weights=weights * z, minlength=totals.size)[blocks]

    shift = float(np.abs(entries).sum(axis=1).max())
    rng = np.random.default_rng(seed)
    x = project(rng.standard_normal(size))
    norm = np.linalg.norm(x)
    if norm < NULL_SPACE_TOL:
        return 0.0, True
    x /= norm
    estimate = -math.inf
    for _ in range(max_iter):
        y = project(entries @ x + shift * x)
        norm = float(np.linalg.norm(y))
        if norm < NULL_SPACE_TOL:
            return 0.0, True
        current = norm - shift
        x = y / norm
        if abs(current - estimate) <= tol:
            return max(0.0, current), True
        estimate = current
    logger.warning(f"Power iteration stopped after {max_iter} iterations without converging")
    return max(0.0, estimate), False


def _null_space_residual(matrix: InfluenceMatrix) -> float:
    entries = matrix.entries
    if entries.size == 0:
        return 0.0
    n = matrix.n_vertices
    ones = np.ones(entries.shape[0])
    worst = float(np.max(np.abs(entries @ ones)))
    for v in range(n):
        vector = ones / n - matrix.block_indicator(v)
        worst = max(worst, float(np.max(np.abs(entries @ vector))))
    return worst


@log_computation("walk_eigenvalue_identity")
def verify_theorem8(
    instance: ListColoringInstance,
    tol: float = SPECTRAL_TOL,
    null_tol: float = NULL_SPACE_TOL,
) -> SpectralReport:
    """
    Compare lambda_2 of the pairwise walk with lambda_1(M) / (n-1), each from
    its own eigen-solve, and check the known null vectors of M.

    Raises:
        NotErgodicError: some |L(v)| < deg(v) + 2
        SingleVertexError: n < 2
    """
    instance.require_glauber_valid()
    walk = build_pairwise_walk(instance)
    n = instance.n
    spectrum = walk_spectrum(walk)
    lambda2 = float(spectrum[1])

    matrix = influence_matrix(instance)
    lambda1 = top_eigenvalue_influence(matrix)
    residual = abs(lambda2 - lambda1 / (n - 1))

    null_residual = _null_space_residual(matrix)
    target = -1.0 / (n - 1)
    multiplicity = int(np.sum(np.abs(spectrum - target) <= tol))
    reversible = walk.is_reversible()
    row_error = float(np.max(np.abs(walk.row_sums() - 1.0)))

    power_value, power_converged = power_iteration_top_eigenvalue(matrix, marginal_table(instance))

    passed = (
        residual <= tol
        and null_residual <= null_tol
        and multiplicity >= n - 1
        and reversible
        and row_error <= tol
    )
    return SpectralReport(
        check="thm8",
        passed=bool(passed),
        lambda2_walk=lambda2,
        lambda1_M=lambda1,
        identity_residual=residual,
        eigen_method="scipy.linalg.eigh (walk) / scipy.linalg.eigvals (M)",
        details={
            "n": n,
            "pairs": len(walk.index),
            "null_space_residual": null_residual,
            "negative_eigenvalue_multiplicity": multiplicity,
            "negative_eigenvalue": target,
            "reversible": reversible,
            "row_sum_error": row_error,
            "power_iteration_lambda1": power_value,
            "power_iteration_converged": power_converged,
            "power_iteration_difference": abs(power_value - lambda1),
        },
    )


def spectral_constant(epsilon: float, delta: int, q: int) -> float:
    """64 (1/eps + 1)^2 Delta / q."""
    return 64.0 * (1.0 / epsilon + 1.0) ** 2 * delta / q


@log_computation("influence_eigenvalue_bound")
def verify_influence_eigenvalue_bound(
    instance: ListColoringInstance,
    epsilon: float,
    delta: Optional[int] = None,
    slack: float = INEQUALITY_SLACK,
) -> SpectralReport:
    """lambda_1(M) against 64 (1/eps + 1)^2 Delta / q and against 4 (1/eps + 1) Delta."""
    delta = int(delta) if delta is not None else max(3, instance.graph.max_degree)
    matrix = influence_matrix(instance)
    lambda1 = top_eigenvalue_influence(matrix)
    strong = spectral_constant(epsilon, delta, instance.q)
    weak = 4.0 * (1.0 / epsilon + 1.0) * delta
    row_norm = float(matrix.row_l1().max()) if matrix.entries.size else 0.0
    passed = lambda1 <= strong + slack and lambda1 <= weak + slack
    return SpectralReport(
        check="thm9",
        passed=bool(passed),
        lambda1_M=lambda1,
        eigen_method="scipy.linalg.eigvals",
        details={
            "bound": strong,
            "weak_bound": weak,
            "max_row_l1": row_norm,
            "epsilon": epsilon,
            "delta": delta,
            "q": instance.q,
        },
    )


# ---------------------------------------------------------------------------
# Local-expansion sweep
# ---------------------------------------------------------------------------

def expansion_levels(n: int, q: int, constant: float) -> List[float]:
    """l_s = min(C/(n-1-s), 1 - 2 q^(-4(n-s))) for s = 0..n-2."""
    levels = []
    for s in range(n - 1):
        conductance_term = 1.0 - 2.0 * float(q) ** (-4.0 * (n - s))
        levels.append(min(constant / (n - 1 - s), conductance_term))
    return levels


def expansion_product(levels: Sequence[float]) -> float:
    """L = prod (1 - l_s)^(-1); inf if some l_s >= 1."""
    product = 1.0
    for level in levels:
        if level >= 1.0:
            return math.inf
        product /= 1.0 - level
    return product


def walk_conductance(walk: PairwiseWalk) -> float:
    """
    Conductance min Q(S, S^c) / pi(S) over nonempty S with pi(S) <= 1/2.

    Exhaustive over subsets, so only for small walks.
    """
    m = len(walk.index)
    if m > CONDUCTANCE_PAIR_LIMIT:
        raise TooLargeError(f"conductance enumeration over {m} pairs exceeds {CONDUCTANCE_PAIR_LIMIT}")
    pi = walk.stationary / walk.stationary.sum()
    flow = pi[:, None] * walk.transition
    masks = np.arange(1, 1 << m, dtype=np.int64)
    members = ((masks[:, None] >> np.arange(m)[None, :]) & 1).astype(np.float64)
    mass = members @ pi
    crossing = ((members @ flow) * (1.0 - members)).sum(axis=1)
    eligible = mass <= 0.5 + 1e-15
    if not np.any(eligible):
        return 1.0
    return float(np.min(crossing[eligible] / mass[eligible]))


def _partials_on(states: np.ndarray, subset: Tuple[int, ...]) -> np.ndarray:
    if not subset:
        return np.zeros((1, 0), dtype=np.int64)
    return np.unique(states[:, list(subset)], axis=0)


def _sample_partial(
    instance: ListColoringInstance, states: Optional[np.ndarray], s: int, rng: np.random.Generator
) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    subset = tuple(sorted(int(x) for x in rng.choice(instance.n, size=s, replace=False)))
    if states is not None:
        row = states[int(rng.integers(states.shape[0]))]
        return subset, tuple(int(row[v]) for v in subset)
    labels = instance.graph.labels
    for _ in range(MAX_REJECTION_TRIES):
        colors = tuple(int(rng.choice(instance.lists[v])) for v in subset)
        partial = PartialColoring.of({labels[v]: c for v, c in zip(subset, colors)})
        if is_extendable(instance, partial):
            return subset, colors
    return None


def _evaluate_partial(instance: ListColoringInstance, subset: Tuple[int, ...], colors: Tuple[int, ...],
                      slack: float) -> Optional[Tuple[float, float, Optional[bool]]]:
    labels = instance.graph.labels
    partial = PartialColoring.of({labels[v]: c for v, c in zip(subset, colors)})
    try:
        conditioned = condition(instance, partial)
    except NonExtendableError:
        logger.debug(f"Skipping non-extendable partial coloring on {subset}")
        return None
    walk = build_pairwise_walk(conditioned)
    lambda2 = second_eigenvalue_walk(walk)
    pi = walk.stationary / walk.stationary.sum()
    conductance_ok = None
    if len(walk.index) <= CONDUCTANCE_PAIR_LIMIT:
        phi_cond = walk_conductance(walk)
        conductance_ok = bool(1.0 - lambda2 >= phi_cond ** 2 / 2.0 - slack)
    return lambda2, float(pi.min()), conductance_ok


@log_computation("local_expansion_sweep")
def local_expansion_sweep(
    instance: ListColoringInstance,
    epsilon: float,
    budget: int = 2000,
    seed: int = 0,
    delta: Optional[int] = None,
    threads: int = 1,
    omega_cap: int = OMEGA_CAP,
    slack: float = INEQUALITY_SLACK,
) -> SpectralReport:
    """
    Worst lambda_2 of the pairwise walk over conditioned instances, per number
    of pinned vertices s, against l_s; the implied gap bound 1/(nL) and the
    mixing bound L n^2 ln(4q).

    Exhaustive when the number of (subset, extendable assignment) pairs is at
    most `budget`; otherwise a seeded sample of about budget/(n-1) partial
    colorings per level, labelled as not certified.
    """
    n, q = instance.n, instance.q
    if n < 2:
        raise SingleVertexError("the sweep needs at least two vertices")
    delta = int(delta) if delta is not None else max(3, instance.graph.max_degree)
    if not (is_triangle_free(instance.graph) and in_region(delta, q, epsilon)):
        logger.warning(f"Sweep bounds are stated for triangle-free instances in the region (Delta={delta}, q={q})")
    constant = spectral_constant(epsilon, delta, q)
    levels = expansion_levels(n, q, constant)

    try:
        states = enumerate_colorings(instance, omega_cap=omega_cap)
    except TooLargeError:
        logger.info("State space above the cap; partial colorings are rejection-sampled")
        states = None

    subset_total = sum(math.comb(n, s) for s in range(n - 1))
    exhaustive = False
    work: Dict[int, List[Tuple[Tuple[int, ...], Tuple[int, ...]]]] = {}
    if states is not None and subset_total <= budget:
        for s in range(n - 1):
            work[s] = [
                (subset, tuple(int(c) for c in row))
                for subset in itertools.combinations(range(n), s)
                for row in _partials_on(states, subset)
            ]
        exhaustive = sum(len(items) for items in work.values()) <= budget
    if not exhaustive:
        rng = np.random.default_rng(seed)
        per_level = max(1, budget // (n - 1))
        work = {}
        for s in range(n - 1):
            drawn = [_sample_partial(instance, states, s, rng) for _ in range(per_level if s else 1)]
            work[s] = [d for d in drawn if d is not None]
        logger.info(f"Sampled sweep: {sum(len(v) for v in work.values())} partial colorings (seed {seed})")

    table = []
    measured = []
    for s in range(n - 1):
        results = parallel_map(lambda item: _evaluate_partial(instance, item[0], item[1], slack), work[s], threads)
        results = [r for r in results if r is not None]
        floor = float(q) ** (-2.0 * (n - s))
        worst = max((r[0] for r in results), default=0.0)
        min_pi = min((r[1] for r in results), default=1.0)
        checked = [r[2] for r in results if r[2] is not None]
        measured.append(max(worst, 0.0))
        table.append({
            "s": s,
            "worst_lambda2": worst,
            "bound": levels[s],
            "partials": len(results),
            "passed": bool(worst <= levels[s] + slack),
            "min_stationary": min_pi,
            "stationary_floor": floor,
            "stationary_floor_holds": bool(min_pi >= floor),
            "conductance_checked": len(checked),
            "conductance_failures": sum(1 for ok in checked if not ok),
        })

    product = expansion_product(levels)
    empirical_product = expansion_product(measured)
    gap_bound = 0.0 if math.isinf(product) else 1.0 / (n * product)
    empirical_gap_bound = 0.0 if math.isinf(empirical_product) else 1.0 / (n * empirical_product)
    mixing = product * n * n * math.log(4 * q)

    details: Dict[str, Any] = {
        "label": "certified (exhaustive)" if exhaustive else "sampled, not certified",
        "constant": constant,
        "epsilon": epsilon,
        "delta": delta,
        "expansion_product": product,
        "gap_lower_bound": gap_bound,
        "empirical_expansion_product": empirical_product,
        "empirical_gap_lower_bound": empirical_gap_bound,
    }
    passed = all(row["passed"] and row["stationary_floor_holds"] and not row["conductance_failures"]
                 for row in table)

    if states is not None and states.shape[0] <= DENSE_GLAUBER_LIMIT and instance.is_glauber_valid():
        gap = spectral_gap(glauber_matrix(instance, omega_cap=omega_cap))
        details["exact_gap"] = gap
        details["exact_gap_above_bound"] = bool(gap >= gap_bound - slack)
        details["exact_gap_above_empirical_bound"] = bool(gap >= empirical_gap_bound - slack)
        passed = passed and details["exact_gap_above_bound"]

    return SpectralReport(
        check="sweep",
        passed=bool(passed),
        eigen_method="scipy.linalg.eigh",
        local_expansion_table=table,
        mixing_bound=mixing,
        details=details,
    )


# ---------------------------------------------------------------------------
# Exact Glauber chain
# ---------------------------------------------------------------------------

def _state_codes(states: np.ndarray, q: int) -> Tuple[np.ndarray, np.ndarray]:
    n = states.shape[1]
    radix = q + 1
    if n * math.log2(radix) >= 63:
        raise TooLargeError(f"state codes for n={n}, q={q} overflow int64")
    weights = radix ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return states @ weights, weights


@log_computation("glauber_matrix")
def glauber_matrix(instance: ListColoringInstance, omega_cap: int = OMEGA_CAP) -> GlauberMatrix:
    """
    Transition matrix of the Glauber chain over Omega in lexicographic order.

    From sigma: pick v uniformly, then a color uniformly from L(v) minus the
    colors on N(v); the current color is always among them.

    Raises:
        NotErgodicError: some |L(v)| < deg(v) + 2
        TooLargeError: |Omega| above omega_cap
    """
    instance.require_glauber_valid()
    states = enumerate_colorings(instance, omega_cap=omega_cap)
    size, n = states.shape
    codes, weights = _state_codes(states, instance.q)

    rows, cols, data = [], [], []
    for v in range(n):
        neighbors = list(instance.graph.adjacency[v])
        around = states[:, neighbors]
        available = np.stack([~np.any(around == c, axis=1) for c in instance.lists[v]], axis=1)
        counts = available.sum(axis=1)
        for a, c in enumerate(instance.lists[v]):
            source = np.flatnonzero(available[:, a])
            target_codes = codes[source] + (c - states[source, v]) * weights[v]
            target = np.searchsorted(codes, target_codes)
            rows.append(source)
            cols.append(target)
            data.append(1.0 / (n * counts[source]))
    transition = scipy.sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    ).tocsr()
    return GlauberMatrix(states=states, transition=transition, n=n, max_list_size=instance.max_list_size)


def glauber_second_eigenvalue(glauber: GlauberMatrix) -> float:
    """lambda_2 of the Glauber matrix; dense up to DENSE_GLAUBER_LIMIT states, else power iteration."""
    size = glauber.size
    if size <= 1:
        return 0.0
    if size <= DENSE_GLAUBER_LIMIT:
        dense = glauber.dense()
        try:
            values = scipy.linalg.eigh((dense + dense.T) / 2.0, eigvals_only=True)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise EigenSolverError(f"Glauber eigen-solve failed: {e}") from e
        return float(values[-2])

    # lazy chain (I + P)/2 has a nonnegative spectrum; its top eigenvalue off the uniform vector is (1 + lambda_2)/2
    rng = np.random.default_rng(0)
    x = rng.standard_normal(size)
    x -= x.mean()
    x /= np.linalg.norm(x)
    estimate = -math.inf
    for _ in range(POWER_ITERATION_MAX_ITER):
        y = 0.5 * (x + glauber.transition @ x)
        y -= y.mean()
        rayleigh = float(x @ y)
        x = y / np.linalg.norm(y)
        if abs(rayleigh - estimate) <= POWER_ITERATION_TOL:
            break
        estimate = rayleigh
    else:
        logger.warning("Glauber power iteration did not converge; gap is approximate")
    return 2.0 * rayleigh - 1.0


def spectral_gap(glauber: GlauberMatrix) -> float:
    """1 - lambda_2 of the Glauber matrix."""
    return 1.0 - glauber_second_eigenvalue(glauber)


def gap_mixing_bound(n: int, max_list_size: int, gap: float) -> float:
    """T_mix <= n ln(4Q) / gap with Q the largest list size."""
    if gap <= 0:
        return math.inf
    return n * math.log(4 * max_list_size) / gap


def exact_worst_tv(glauber: GlauberMatrix, steps: int) -> float:
    """max over start states of the TV distance of P^steps(x, .) from uniform."""
    size = glauber.size
    if size > EXACT_TV_LIMIT:
        raise TooLargeError(f"exact TV needs at most {EXACT_TV_LIMIT} states, got {size}")
    power = np.linalg.matrix_power(glauber.dense(), steps)
    return float(0.5 * np.abs(power - 1.0 / size).sum(axis=1).max())


def exact_mixing_time(glauber: GlauberMatrix, threshold: float = MIXING_THRESHOLD,
                      max_steps: int = 100_000) -> Optional[int]:
    """First t with worst-start TV <= threshold, or None after max_steps."""
    size = glauber.size
    if size > EXACT_TV_LIMIT:
        raise TooLargeError(f"exact mixing time needs at most {EXACT_TV_LIMIT} states, got {size}")
    dense = glauber.dense()
    current = np.eye(size)
    for t in range(max_steps + 1):
        if 0.5 * np.abs(current - 1.0 / size).sum(axis=1).max() <= threshold:
            return t
        current = current @ dense
    return None


@log_computation("glauber_gap")
def verify_glauber_gap(instance: ListColoringInstance, epsilon: Optional[float] = None,
                       omega_cap: int = OMEGA_CAP, max_steps: int = 100_000) -> SpectralReport:
    """Exact gap, its mixing bound, and the exact worst-start mixing time when small enough."""
    glauber = glauber_matrix(instance, omega_cap=omega_cap)
    lambda2 = glauber_second_eigenvalue(glauber)
    gap = 1.0 - lambda2
    bound = gap_mixing_bound(instance.n, glauber.max_list_size, gap)
    details: Dict[str, Any] = {
        "states": glauber.size,
        "gap": gap,
        "eigen_method": "dense" if glauber.size <= DENSE_GLAUBER_LIMIT else "power iteration (lazy chain)",
    }
    passed = gap > 0
    if glauber.size <= EXACT_TV_LIMIT:
        t_mix = exact_mixing_time(glauber, max_steps=max_steps)
        details["exact_mixing_time"] = t_mix
        details["exact_mixing_time_within_bound"] = t_mix is not None and t_mix <= bound
        passed = passed and bool(details["exact_mixing_time_within_bound"])
    return SpectralReport(
        check="gap",
        passed=bool(passed),
        lambda2_walk=None,
        eigen_method=details["eigen_method"],
        mixing_bound=bound,
        details=details,
    )


def mixing_bound_theorem1(n: int, delta: int, q: int, epsilon: float) -> MixingBound:
    """
    Exponent c = 80 C_alpha^2 with C_alpha = (64/alpha)(1/eps + 1)^2 and the
    intermediate quantities of the n^c bound.

    Raises:
        BadParamsError: eps <= 0, n < 1, or q < alpha Delta + 1
    """
    if epsilon <= 0:
        raise BadParamsError(f"epsilon must be positive, got {epsilon}")
    if n < 1 or delta < 1:
        raise BadParamsError(f"need n >= 1 and Delta >= 1, got n={n}, Delta={delta}")
    alpha = (1.0 + epsilon) * alpha_star()
    if q < alpha * delta + 1:
        raise BadParamsError(f"q={q} is below alpha Delta + 1 = {alpha * delta + 1:.4f}")
    c_alpha = (64.0 / alpha) * (1.0 / epsilon + 1.0) ** 2
    exponent = 80.0 * c_alpha ** 2
    constant = spectral_constant(epsilon, delta, q)
    if alpha >= 2:
        logger.warning(f"alpha = {alpha:.4f} >= 2; the bound's derivation assumes alpha < 2")
    return MixingBound(
        n=n,
        delta=delta,
        q=q,
        epsilon=epsilon,
        alpha=alpha,
        c_alpha=c_alpha,
        exponent=exponent,
        log10_bound=exponent * math.log10(n) if n > 1 else 0.0,
        constant=constant,
        k0=math.ceil(2 * constant),
        log10_expansion_product_bound=74.0 * c_alpha ** 2 * math.log10(n) if n > 1 else 0.0,
        alpha_below_two=alpha < 2,
        q_at_most_two_delta=q <= 2 * delta,
        constant_within_c_alpha=constant <= c_alpha + INEQUALITY_SLACK,
    )
