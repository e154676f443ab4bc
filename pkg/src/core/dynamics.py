"""
Simulated Glauber dynamics: compiled single-site update loops, greedy starts,
trace statistics, total-variation estimates against the exact uniform
distribution, and an identity-coupling diagnostic.

Randomness comes from numpy's Philox counter-based generator. Chain k of a
run with master seed s draws from child k of SeedSequence(s).spawn(chains);
each chain consumes vertex indices and uniforms in blocks of STEP_CHUNK, so a
trajectory depends only on (instance, seed, steps), never on stride or thread
count.
"""

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numba import njit
from scipy import stats

from .errors import BadParamsError, GreedyStuckError, TooLargeError, UnsatisfiableError
from .graph_core import ListColoringInstance
from .oracle import enumerate_colorings, sample_uniform_coloring
from .spectral import GlauberMatrix, glauber_matrix
from ..utils.config import (
    CHAIN_BLOCK,
    DEFAULT_STRIDE,
    DEFAULT_TRANSITION_ROWS,
    DEFAULT_TRANSITION_SAMPLES,
    OMEGA_CAP,
    STEP_CHUNK,
    TV_HISTOGRAM_CAP,
)
from ..utils.helpers import parallel_map
from ..utils.logging_utils import log_computation, log_performance_metric

logger = logging.getLogger(__name__)

START_STRATEGIES = ("smallest", "largest", "random")


@njit(cache=True, nogil=True)
def _pick_available(coloring, v, indptr, indices, list_ptr, list_vals, stamp, epoch, u):
    """Mark neighbor colors with the epoch, then take the floor(u*m)-th unmarked list color."""
    for e in range(indptr[v], indptr[v + 1]):
        stamp[coloring[indices[e]]] = epoch
    m = 0
    for a in range(list_ptr[v], list_ptr[v + 1]):
        if stamp[list_vals[a]] != epoch:
            m += 1
    target = int(u * m)
    if target >= m:
        target = m - 1
    for a in range(list_ptr[v], list_ptr[v + 1]):
        c = list_vals[a]
        if stamp[c] != epoch:
            if target == 0:
                return c
            target -= 1
    return coloring[v]


@njit(cache=True, nogil=True)
def _glauber_kernel(coloring, indptr, indices, list_ptr, list_vals, stamp, epoch, vertices, uniforms):
    for t in range(vertices.shape[0]):
        epoch += 1
        v = vertices[t]
        coloring[v] = _pick_available(coloring, v, indptr, indices, list_ptr, list_vals, stamp, epoch, uniforms[t])
    return epoch


@njit(cache=True, nogil=True)
def _coupling_kernel(first, second, indptr, indices, list_ptr, list_vals, stamp_a, stamp_b,
                     epoch, vertices, uniforms, diff):
    """Advance both chains with shared draws; returns (steps taken, epoch, diff), stopping when diff hits 0."""
    for t in range(vertices.shape[0]):
        epoch += 1
        v = vertices[t]
        before = first[v] != second[v]
        first[v] = _pick_available(first, v, indptr, indices, list_ptr, list_vals, stamp_a, epoch, uniforms[t])
        second[v] = _pick_available(second, v, indptr, indices, list_ptr, list_vals, stamp_b, epoch, uniforms[t])
        after = first[v] != second[v]
        if before and not after:
            diff -= 1
        elif after and not before:
            diff += 1
        if diff == 0:
            return t + 1, epoch, diff
    return vertices.shape[0], epoch, diff


@njit(cache=True, nogil=True)
def _single_step_targets(coloring, indptr, indices, list_ptr, list_vals, stamp, epoch, vertices, uniforms, out):
    """Color chosen by one update from a fixed state, for each draw; the state is left unchanged."""
    for t in range(vertices.shape[0]):
        epoch += 1
        out[t] = _pick_available(coloring, vertices[t], indptr, indices, list_ptr, list_vals, stamp, epoch,
                                 uniforms[t])
    return epoch


@dataclass(eq=False)
class ChainState:
    """
    A proper list-coloring plus the occupancy stamps used to find available colors.

    stamp[c] == epoch marks color c as used around the vertex being updated;
    bumping epoch clears every mark at once.
    """

    coloring: np.ndarray
    stamp: np.ndarray
    epoch: int = 0

    @classmethod
    def of(cls, coloring, q: int) -> "ChainState":
        return cls(np.array(coloring, dtype=np.int64), np.zeros(q + 1, dtype=np.int64), 0)

    def copy(self) -> "ChainState":
        return ChainState(self.coloring.copy(), self.stamp.copy(), self.epoch)


@dataclass
class ChainTrace:
    """Statistics of one chain recorded every `stride` steps."""

    seed: int
    stride: int
    steps: int
    start: str
    stats: List[Dict[str, Any]] = field(default_factory=list)
    final: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class TVEstimate:
    tv: float
    bias_bound: float
    chains: int
    steps: int
    states: int
    seed: int
    label: str = "fixed-start TV"

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class CouplingResult:
    coalesced: bool
    steps: Optional[int]
    max_steps: int
    seed: int
    initial_disagreements: int
    label: str = "identity coupling diagnostic"

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class FrequencyTest:
    """
    Chi-square comparison of one-step transition counts with rows of the Glauber matrix.

    statistic, support and start_state describe the row with the smallest
    p-value; p_value is that p-value times the number of rows tested, capped at 1.
    """

    statistic: float
    p_value: float
    samples: int
    support: int
    start_state: int
    rows_tested: int = 1
    row_p_values: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _generator(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def chain_generators(seed: int, chains: int) -> List[np.random.Generator]:
    """One Philox stream per chain, from SeedSequence(seed).spawn(chains)."""
    return [_generator(child) for child in np.random.SeedSequence(seed).spawn(chains)]


def _kernel_arrays(instance: ListColoringInstance):
    indptr, indices = instance.graph.csr()
    list_ptr, list_vals = instance.list_csr()
    return indptr, indices, list_ptr, list_vals


def initial_state(instance: ListColoringInstance, seed: Optional[int] = None,
                  strategy: str = "smallest") -> ChainState:
    """
    Greedy proper coloring in vertex order.

    strategy "smallest" or "largest" takes the extreme available color; "random"
    takes a seeded uniform available color. If greedy gets stuck the coloring
    is drawn from the exact oracle instead, when Omega is small enough.

    Raises:
        GreedyStuckError: greedy failed and the oracle fallback is out of reach
    """
    if strategy not in START_STRATEGIES:
        raise BadParamsError(f"unknown start strategy '{strategy}'")
    rng = _generator(seed if seed is not None else 0)
    coloring = np.zeros(instance.n, dtype=np.int64)
    for v in range(instance.n):
        used = {int(coloring[u]) for u in instance.graph.adjacency[v] if u < v}
        available = [c for c in instance.lists[v] if c not in used]
        if not available:
            logger.warning(f"Greedy start stuck at vertex {instance.graph.labels[v]}; falling back to the oracle")
            try:
                coloring = sample_uniform_coloring(instance, rng)
            except (TooLargeError, UnsatisfiableError) as e:
                raise GreedyStuckError(f"greedy coloring stuck at vertex {instance.graph.labels[v]}: {e}") from e
            break
        if strategy == "smallest":
            coloring[v] = available[0]
        elif strategy == "largest":
            coloring[v] = available[-1]
        else:
            coloring[v] = available[int(rng.integers(len(available)))]
    return ChainState.of(coloring, instance.q)


def glauber_step(state: ChainState, instance: ListColoringInstance, rng: np.random.Generator) -> ChainState:
    """One update: v uniform, then a uniform color of L(v) not used on N(v)."""
    vertices = np.array([rng.integers(instance.n)], dtype=np.int64)
    uniforms = np.array([rng.random()])
    state.epoch = _glauber_kernel(state.coloring, *_kernel_arrays(instance), state.stamp, state.epoch,
                                  vertices, uniforms)
    return state


def _draw_chunk(rng: np.random.Generator, n: int, size: int):
    return rng.integers(0, n, size=size, dtype=np.int64), rng.random(size)


def run_chain(instance: ListColoringInstance, state: ChainState, steps: int, rng: np.random.Generator,
              observe=None, stride: int = 0) -> ChainState:
    """
    Advance `state` by `steps` updates in place.

    Args:
        observe: Optional callback observe(t, state) at t = stride, 2 stride, ...
        stride: Observation interval; 0 disables observation
    """
    if steps < 0:
        raise BadParamsError(f"steps must be nonnegative, got {steps}")
    arrays = _kernel_arrays(instance)
    n = instance.n
    if n == 0:
        return state
    done = 0
    while done < steps:
        size = min(STEP_CHUNK, steps - done)
        vertices, uniforms = _draw_chunk(rng, n, size)
        offset = 0
        while offset < size:
            span = size - offset
            if observe is not None and stride > 0:
                span = min(span, stride - (done + offset) % stride)
            state.epoch = _glauber_kernel(state.coloring, *arrays, state.stamp, state.epoch,
                                          vertices[offset:offset + span], uniforms[offset:offset + span])
            offset += span
            t = done + offset
            if observe is not None and stride > 0 and t % stride == 0:
                observe(t, state)
        done += size
    if logger.isEnabledFor(logging.DEBUG) and not instance.is_proper(state.coloring.tolist()):
        raise AssertionError("Glauber chain left the set of proper colorings")
    return state


@log_computation("sample_chain")
def sample_chain(instance: ListColoringInstance, steps: int, seed: int, stride: int = DEFAULT_STRIDE,
                 start: str = "smallest") -> ChainTrace:
    """Run one chain from a greedy start, recording Hamming distance to the start and color counts."""
    if stride <= 0:
        raise BadParamsError(f"stride must be positive, got {stride}")
    instance.require_glauber_valid()
    state = initial_state(instance, seed, start)
    reference = state.coloring.copy()
    trace = ChainTrace(seed=seed, stride=stride, steps=steps, start=start)

    def record(t: int, current: ChainState):
        counts = np.bincount(current.coloring, minlength=instance.q + 1)[1:]
        trace.stats.append({
            "t": t,
            "hamming": int(np.count_nonzero(current.coloring != reference)),
            "color_counts": counts.tolist(),
        })

    record(0, state)
    rng = chain_generators(seed, 1)[0]
    run_chain(instance, state, steps, rng, observe=record, stride=stride)
    if steps % stride:
        record(steps, state)
    trace.final = state.coloring.tolist()
    return trace


def _state_index(states: np.ndarray, q: int):
    weights = (q + 1) ** np.arange(states.shape[1] - 1, -1, -1, dtype=np.int64)
    codes = states @ weights
    return codes, weights


def _histogram_tv(indices: np.ndarray, size: int) -> float:
    hist = np.bincount(indices, minlength=size) / max(len(indices), 1)
    return float(0.5 * np.abs(hist - 1.0 / size).sum())


@log_computation("estimate_tv")
def estimate_tv(instance: ListColoringInstance, steps: int, chains: int, seed: int,
                threads: int = 1, histogram_cap: int = TV_HISTOGRAM_CAP) -> TVEstimate:
    """
    Empirical TV distance from uniform after `steps` updates, over `chains`
    independent chains from the smallest-color greedy start.

    Raises:
        NotErgodicError: some |L(v)| < deg(v) + 2
        TooLargeError: |Omega| above histogram_cap
    """
    if chains < 1:
        raise BadParamsError(f"need at least one chain, got {chains}")
    instance.require_glauber_valid()
    states = enumerate_colorings(instance, omega_cap=histogram_cap)
    codes, weights = _state_index(states, instance.q)
    start = initial_state(instance, seed, "smallest")
    generators = chain_generators(seed, chains)

    def run_block(first: int) -> np.ndarray:
        finals = []
        for k in range(first, min(first + CHAIN_BLOCK, chains)):
            state = start.copy()
            run_chain(instance, state, steps, generators[k])
            finals.append(state.coloring @ weights)
        return np.array(finals, dtype=np.int64)

    blocks = parallel_map(run_block, list(range(0, chains, CHAIN_BLOCK)), threads)
    final_codes = np.concatenate(blocks)
    tv = _histogram_tv(np.searchsorted(codes, final_codes), states.shape[0])
    return TVEstimate(
        tv=tv,
        bias_bound=states.shape[0] / (2.0 * chains),
        chains=chains,
        steps=steps,
        states=int(states.shape[0]),
        seed=seed,
    )


@log_computation("estimate_tv_long_run")
def estimate_tv_long_run(instance: ListColoringInstance, steps: int, seed: int, stride: int,
                         burn_in: int = 0, histogram_cap: int = TV_HISTOGRAM_CAP) -> TVEstimate:
    """TV distance from uniform of the states one chain visits every `stride` steps after burn-in."""
    if stride <= 0:
        raise BadParamsError(f"stride must be positive, got {stride}")
    instance.require_glauber_valid()
    states = enumerate_colorings(instance, omega_cap=histogram_cap)
    codes, weights = _state_index(states, instance.q)
    state = initial_state(instance, seed, "smallest")
    rng = chain_generators(seed, 1)[0]
    run_chain(instance, state, burn_in, rng)
    visited: List[int] = []
    run_chain(instance, state, steps, rng, observe=lambda t, s: visited.append(int(s.coloring @ weights)),
              stride=stride)
    samples = len(visited)
    tv = _histogram_tv(np.searchsorted(codes, np.array(visited, dtype=np.int64)), states.shape[0])
    return TVEstimate(
        tv=tv,
        bias_bound=states.shape[0] / (2.0 * max(samples, 1)),
        chains=samples,
        steps=steps,
        states=int(states.shape[0]),
        seed=seed,
        label="long-run snapshot TV",
    )


@log_computation("coupling_time")
def coupling_time(instance: ListColoringInstance, seed: int, max_steps: int,
                  first: Optional[ChainState] = None, second: Optional[ChainState] = None) -> CouplingResult:
    """
    First step at which two chains under the identity coupling agree.

    Both chains use the same vertex and the same uniform, mapped into each
    chain's own sorted available set. Starts default to the smallest- and
    largest-color greedy colorings. A timeout is reported, not raised.

    Raises:
        NotErgodicError: some |L(v)| < deg(v) + 2
    """
    instance.require_glauber_valid()
    a = (first or initial_state(instance, seed, "smallest")).copy()
    b = (second or initial_state(instance, seed, "largest")).copy()
    diff = int(np.count_nonzero(a.coloring != b.coloring))
    initial = diff
    if diff == 0:
        return CouplingResult(True, 0, max_steps, seed, 0)

    rng = chain_generators(seed, 1)[0]
    arrays = _kernel_arrays(instance)
    epoch = max(a.epoch, b.epoch)
    done = 0
    while done < max_steps:
        size = min(STEP_CHUNK, max_steps - done)
        vertices, uniforms = _draw_chunk(rng, instance.n, STEP_CHUNK)
        taken, epoch, diff = _coupling_kernel(a.coloring, b.coloring, *arrays, a.stamp, b.stamp, epoch,
                                              vertices[:size], uniforms[:size], diff)
        done += taken
        if diff == 0:
            return CouplingResult(True, done, max_steps, seed, initial)
    logger.info(f"Coupling did not coalesce within {max_steps} steps")
    return CouplingResult(False, None, max_steps, seed, initial)


def _row_frequencies(
    instance: ListColoringInstance, glauber: GlauberMatrix, codes: np.ndarray, weights: np.ndarray,
    state: ChainState, samples: int, rng: np.random.Generator,
) -> Tuple[float, float, int, int]:
    """(statistic, p-value, support size, row index) for one start state."""
    row_index = int(np.searchsorted(codes, state.coloring @ weights))
    expected_row = glauber.transition[row_index].toarray().ravel()
    vertices, uniforms = _draw_chunk(rng, instance.n, samples)
    chosen = np.zeros(samples, dtype=np.int64)
    _single_step_targets(state.coloring, *_kernel_arrays(instance), state.stamp, state.epoch,
                         vertices, uniforms, chosen)
    targets = np.searchsorted(codes, codes[row_index] + (chosen - state.coloring[vertices]) * weights[vertices])
    observed = np.bincount(targets, minlength=glauber.size)

    support = np.flatnonzero(expected_row > 0)
    if np.any(observed[np.setdiff1d(np.arange(glauber.size), support)]):
        return math.inf, 0.0, int(support.size), row_index
    if support.size < 2:
        return 0.0, 1.0, int(support.size), row_index
    expected = expected_row[support] * samples
    statistic, p_value = stats.chisquare(observed[support], expected * observed[support].sum() / expected.sum())
    return float(statistic), float(p_value), int(support.size), row_index


@log_computation("transition_frequency_test")
def transition_frequency_test(instance: ListColoringInstance, samples: int = DEFAULT_TRANSITION_SAMPLES,
                              seed: int = 0, starts: Optional[Sequence[ChainState]] = None,
                              rows: int = DEFAULT_TRANSITION_ROWS,
                              omega_cap: int = OMEGA_CAP) -> FrequencyTest:
    """
    Chi-square test of simulated one-step moves against rows of the exact
    Glauber matrix: the given starts, else every state when |Omega| <= rows,
    else a seeded sample of `rows` states. Each row gets its own stream.
    """
    if samples < 1 or rows < 1:
        raise BadParamsError(f"need positive samples and rows, got {samples} and {rows}")
    glauber = glauber_matrix(instance, omega_cap=omega_cap)
    codes, weights = _state_index(glauber.states, instance.q)
    if starts:
        states = [s.copy() for s in starts]
    else:
        if glauber.size <= rows:
            picked = np.arange(glauber.size)
        else:
            picked = np.sort(_generator(seed).choice(glauber.size, size=rows, replace=False))
        states = [ChainState.of(glauber.states[r], instance.q) for r in picked]

    generators = chain_generators(seed, len(states))
    results = [_row_frequencies(instance, glauber, codes, weights, state, samples, rng)
               for state, rng in zip(states, generators)]
    statistic, p_value, support, row_index = min(results, key=lambda r: r[1])
    adjusted = min(1.0, p_value * len(results))
    logger.info(f"Transition frequencies over {len(results)} rows: smallest p-value {p_value:.4g}")
    return FrequencyTest(statistic, adjusted, samples, support, row_index, len(results),
                         [r[1] for r in results])


def benchmark_throughput(instance: ListColoringInstance, steps: int, seed: int = 0) -> float:
    """Glauber steps per second on one chain; the compile run is excluded."""
    state = initial_state(instance, seed, "smallest")
    rng = chain_generators(seed, 1)[0]
    run_chain(instance, state.copy(), min(steps, 1000), rng)
    started = time.perf_counter()
    run_chain(instance, state, steps, rng)
    elapsed = time.perf_counter() - started
    rate = steps / elapsed if elapsed > 0 else math.inf
    log_performance_metric("glauber_steps_per_second", rate, "steps/s")
    return rate
