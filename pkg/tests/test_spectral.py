import math

import numpy as np
import pytest

from src.core.errors import BadParamsError, NotErgodicError, SingleVertexError, TooLargeError
from src.core.generators import cycle, full_palette_instance, grid, path, star
from src.core.graph_core import build_instance
from src.core.influence import influence_matrix
from src.core.oracle import count_colorings, marginal_table
from src.core.spectral import (
    build_pairwise_walk,
    exact_mixing_time,
    exact_worst_tv,
    expansion_levels,
    expansion_product,
    gap_mixing_bound,
    glauber_matrix,
    influence_spectrum,
    local_expansion_sweep,
    mixing_bound_theorem1,
    power_iteration_top_eigenvalue,
    spectral_constant,
    spectral_gap,
    top_eigenvalue_influence,
    verify_glauber_gap,
    verify_influence_eigenvalue_bound,
    verify_theorem8,
    walk_spectrum,
)


@pytest.fixture
def path3_q4():
    """36 proper colorings; small enough for exact matrix powers."""
    return full_palette_instance(path(3), 4)


@pytest.mark.parametrize("fixture", ["star3_q7", "path4_q5", "cycle4_q5", "uneven_lists"])
def test_walk_eigenvalue_matches_influence_eigenvalue(fixture, request):
    instance = request.getfixturevalue(fixture)
    report = verify_theorem8(instance)
    assert report.passed, report.details
    assert report.identity_residual <= 1e-8
    assert report.lambda2_walk == pytest.approx(report.lambda1_M / (instance.n - 1), abs=1e-8)
    details = report.details
    assert details["null_space_residual"] <= 1e-12
    assert details["negative_eigenvalue_multiplicity"] >= instance.n - 1
    assert details["reversible"]


GENERATED = [(n, edges, seed) for n in (4, 5, 6) for edges in (n - 1, n, n + 1) for seed in range(6)]


@pytest.mark.parametrize("n, edges, seed", GENERATED)
def test_walk_identity_on_generated_instances(n, edges, seed, random_instance):
    instance = random_instance(n, edges, seed)
    report = verify_theorem8(instance)
    assert report.passed, report.details
    assert report.lambda2_walk == pytest.approx(report.lambda1_M / (n - 1), abs=1e-8)


def test_theorem8_requires_ergodic_instance():
    tight = build_instance([(0, 1)], [[1, 2], [1, 2, 3]], 3)
    with pytest.raises(NotErgodicError):
        verify_theorem8(tight)


def test_single_vertex_has_no_walk():
    lonely = build_instance([], [[1, 2]], 2)
    with pytest.raises(SingleVertexError):
        build_pairwise_walk(lonely)
    with pytest.raises(SingleVertexError):
        local_expansion_sweep(lonely, 0.1)


def test_walk_is_a_reversible_stochastic_matrix(uneven_lists):
    walk = build_pairwise_walk(uneven_lists)
    np.testing.assert_allclose(walk.row_sums(), 1.0, atol=1e-12)
    assert walk.stationary.sum() == pytest.approx(1.0, abs=1e-12)
    assert walk.is_reversible()
    flow = walk.stationary[:, None] * walk.transition
    np.testing.assert_allclose(flow, flow.T, atol=1e-15)
    spectrum = walk_spectrum(walk)
    assert spectrum[0] == pytest.approx(1.0, abs=1e-10)
    assert np.all(np.diff(spectrum) <= 1e-12)


def test_walk_drops_zero_marginal_pairs():
    # vertex 1 can never take color 1
    forced = build_instance([(0, 1), (1, 2)], [[1], [1, 2, 3], [2, 3, 4, 5]], 5)
    walk = build_pairwise_walk(forced)
    assert (1, 1) in walk.dropped_pairs
    assert (1, 1) not in walk.index
    counts = count_colorings(forced)
    assert all(counts.per_pair[v, i] > 0 for v, i in walk.index)


def test_influence_spectrum_is_real_and_sorted(cycle4_q5):
    values = influence_spectrum(influence_matrix(cycle4_q5))
    assert values.dtype.kind == "f"
    assert np.all(np.diff(values) <= 1e-12)
    assert top_eigenvalue_influence(np.zeros((0, 0))) == 0.0


def test_power_iteration_agrees_with_eigen_solver(path4_q5):
    matrix = influence_matrix(path4_q5)
    value, converged = power_iteration_top_eigenvalue(matrix, marginal_table(path4_q5))
    assert converged
    assert value == pytest.approx(top_eigenvalue_influence(matrix), abs=1e-6)


def test_influence_eigenvalue_bound_on_star(star3_q7):
    report = verify_influence_eigenvalue_bound(star3_q7, 0.1)
    assert report.passed
    assert report.details["bound"] == pytest.approx(spectral_constant(0.1, 3, 7))
    assert report.details["weak_bound"] == pytest.approx(4 * 11 * 3)
    assert report.lambda1_M <= report.details["max_row_l1"] + 1e-12


def test_expansion_levels_formula():
    n, q, constant = 6, 5, 3.0
    levels = expansion_levels(n, q, constant)
    assert len(levels) == n - 1
    for s, level in enumerate(levels):
        assert level == pytest.approx(min(constant / (n - 1 - s), 1 - 2 * q ** (-4 * (n - s))))
    # the last level is capped just below one
    assert levels[-1] < 1.0
    assert expansion_product([0.5, 0.5]) == pytest.approx(4.0)
    assert math.isinf(expansion_product([0.2, 1.0]))


def test_glauber_matrix_is_symmetric_and_stochastic(path3_q4):
    glauber = glauber_matrix(path3_q4)
    assert glauber.size == count_colorings(path3_q4).total == 4 * 3 * 3
    dense = glauber.dense()
    np.testing.assert_allclose(dense.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(dense, dense.T, atol=1e-15)
    assert glauber.states.tolist() == sorted(glauber.states.tolist())


def test_glauber_matrix_rejects_tight_lists():
    with pytest.raises(NotErgodicError):
        glauber_matrix(build_instance([(0, 1)], [[1, 2], [1, 2]], 2))


def test_gap_controls_exact_mixing_time(path3_q4):
    glauber = glauber_matrix(path3_q4)
    gap = spectral_gap(glauber)
    assert 0 < gap <= 1
    t_mix = exact_mixing_time(glauber)
    assert t_mix is not None
    assert t_mix <= gap_mixing_bound(3, 4, gap)
    assert exact_worst_tv(glauber, t_mix) <= 0.25
    assert exact_worst_tv(glauber, 0) > 0.25


def test_exact_tv_refuses_large_chains(star3_q7):
    glauber = glauber_matrix(star3_q7)
    with pytest.raises(TooLargeError):
        exact_worst_tv(glauber, 1)


def test_verify_glauber_gap(path3_q4):
    report = verify_glauber_gap(path3_q4)
    assert report.passed
    assert report.details["states"] == 36
    assert report.details["exact_mixing_time_within_bound"]
    assert report.mixing_bound == pytest.approx(gap_mixing_bound(3, 4, report.details["gap"]))
    assert gap_mixing_bound(3, 4, 0.0) == math.inf


def test_exhaustive_sweep_on_star(star3_q7):
    report = local_expansion_sweep(star3_q7, 0.1, budget=2000)
    assert report.details["label"] == "certified (exhaustive)"
    assert report.passed
    table = report.local_expansion_table
    assert [row["s"] for row in table] == [0, 1, 2]
    # pinning nothing, one vertex, then any two of the four
    assert [row["partials"] for row in table] == [1, 4 * 7, 3 * 42 + 3 * 49]
    assert all(row["stationary_floor_holds"] for row in table)
    assert report.details["exact_gap_above_bound"]


@pytest.mark.parametrize(
    "graph, q",
    [
        (star(3), 7),
        (path(4), 5),
        (cycle(4), 5),
        (cycle(5), 5),
        pytest.param(grid(2, 3), 5, marks=pytest.mark.slow),
    ],
    ids=["star3", "path4", "cycle4", "cycle5", "grid2x3"],
)
def test_exact_gap_is_above_the_expansion_bound(graph, q):
    instance = full_palette_instance(graph, q)
    report = local_expansion_sweep(instance, 0.1, budget=20_000)
    assert report.details["label"] == "certified (exhaustive)"
    gap = spectral_gap(glauber_matrix(instance))
    assert gap > 0
    assert gap >= report.details["gap_lower_bound"] - 1e-9
    assert gap >= report.details["empirical_gap_lower_bound"] - 1e-9


@pytest.mark.parametrize("seed", range(3))
def test_exact_gap_on_generated_instances(seed, random_instance):
    instance = random_instance(5, 5, seed)
    report = local_expansion_sweep(instance, 0.1, budget=20_000)
    assert report.details["label"] == "certified (exhaustive)"
    gap = spectral_gap(glauber_matrix(instance))
    assert gap >= report.details["empirical_gap_lower_bound"] - 1e-9
    assert gap >= report.details["gap_lower_bound"] - 1e-9


def test_sampled_sweep_is_labelled(star3_q7):
    report = local_expansion_sweep(star3_q7, 0.1, budget=10, seed=2)
    assert report.details["label"] == "sampled, not certified"
    again = local_expansion_sweep(star3_q7, 0.1, budget=10, seed=2)
    assert report.local_expansion_table == again.local_expansion_table


def test_mixing_bound_values():
    bound = mixing_bound_theorem1(100, 3, 7, 0.1)
    alpha = 1.1 * 1.7632228343518968
    c_alpha = (64 / alpha) * 11 ** 2
    assert bound.alpha == pytest.approx(alpha)
    assert bound.c_alpha == pytest.approx(c_alpha)
    assert bound.exponent == pytest.approx(80 * c_alpha ** 2)
    assert bound.log10_bound == pytest.approx(80 * c_alpha ** 2 * 2)
    assert bound.k0 == math.ceil(2 * spectral_constant(0.1, 3, 7))
    assert bound.bound == math.inf
    assert bound.to_dict()["bound"] == math.inf


@pytest.mark.parametrize(
    "n, delta, q, epsilon",
    [(10, 3, 7, 0.0), (0, 3, 7, 0.1), (10, 3, 6, 0.1)],
)
def test_mixing_bound_rejects_bad_parameters(n, delta, q, epsilon):
    with pytest.raises(BadParamsError):
        mixing_bound_theorem1(n, delta, q, epsilon)
