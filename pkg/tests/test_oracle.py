import itertools
from fractions import Fraction

import numpy as np
import pytest

from src.core.errors import (
    BadParamsError,
    DegenerateMarginalError,
    TooLargeError,
    UnsatisfiableError,
    ZeroConditioningError,
)
from src.core.generators import (
    full_palette_instance,
    random_lists_instance,
    random_triangle_free,
    star,
)
from src.core.graph_core import PartialColoring, build_instance
from src.core.oracle import (
    conditional_marginal,
    conditional_table,
    count_colorings,
    enumerate_colorings,
    is_extendable,
    is_satisfiable,
    marginal,
    marginal_table,
    p_max,
    ratio_R,
    sample_uniform_coloring,
)


def brute_force(instance):
    """Every proper list-coloring by itertools.product, in lexicographic order."""
    return [
        coloring for coloring in itertools.product(*instance.lists)
        if instance.is_proper(coloring)
    ]


@pytest.mark.parametrize("delta, q", [(3, 5), (4, 6), (3, 7)])
def test_star_count_closed_form(delta, q):
    instance = full_palette_instance(star(delta), q)
    counts = count_colorings(instance)
    assert counts.total == q * (q - 1) ** delta
    assert counts.pair(0, 1) == (q - 1) ** delta
    # a leaf pinned to k leaves q - 1 center colors, each with (q-1)^(delta-1) completions
    assert counts.quad(0, 1, 1, 2) == (q - 1) ** (delta - 1)
    assert counts.quad(0, 1, 1, 1) == 0


def test_counts_match_brute_force(uneven_lists):
    expected = brute_force(uneven_lists)
    counts = count_colorings(uneven_lists)
    assert counts.total == len(expected)
    for v in range(uneven_lists.n):
        for c in uneven_lists.lists[v]:
            assert counts.pair(v, c) == sum(1 for s in expected if s[v] == c)


def test_enumeration_is_lexicographic(uneven_lists):
    states = enumerate_colorings(uneven_lists)
    assert states.tolist() == [list(s) for s in brute_force(uneven_lists)]
    assert not states.flags.writeable


def test_threaded_count_agrees(path4_q5):
    single = count_colorings(path4_q5, threads=1)
    split = count_colorings(path4_q5, threads=3)
    assert single.total == split.total == 5 * 4 ** 3
    np.testing.assert_array_equal(single.per_pair, split.per_pair)
    np.testing.assert_array_equal(single.per_quad, split.per_quad)


def test_unsatisfiable_and_caps():
    triangle = build_instance([(0, 1), (1, 2), (0, 2)], [[1, 2]] * 3, 2)
    assert not is_satisfiable(triangle)
    with pytest.raises(UnsatisfiableError):
        count_colorings(triangle)
    with pytest.raises(TooLargeError):
        count_colorings(full_palette_instance(star(3), 7), cap=100)
    with pytest.raises(TooLargeError):
        enumerate_colorings(full_palette_instance(star(3), 7), omega_cap=10)
    with pytest.raises(BadParamsError):
        count_colorings(triangle, cap=2 ** 63)


def test_marginals_and_conditionals(star3_q7):
    assert marginal(star3_q7, 0, 3, exact=True) == Fraction(1, 7)
    table = marginal_table(star3_q7)
    np.testing.assert_allclose(table[:, 1:], 1.0 / 7)
    assert conditional_marginal(star3_q7, 0, 2, 1, 2) == 0.0
    assert conditional_marginal(star3_q7, 0, 2, 1, 5) == pytest.approx(1.0 / 6, abs=1e-12)
    cond = conditional_table(star3_q7)
    assert cond[0, 4, 0, 4] == 1.0
    assert cond[0, 4, 0, 3] == 0.0


def test_zero_conditioning_and_degenerate_ratio():
    forced = build_instance([(0, 1)], [[1], [1, 2]], 2)
    assert marginal(forced, 1, 1) == 0.0
    with pytest.raises(ZeroConditioningError):
        conditional_marginal(forced, 1, 1, 0, 1)
    with pytest.raises(DegenerateMarginalError):
        ratio_R(forced, 0)
    # zero rows for colors that cannot be pinned
    assert not conditional_table(forced)[1, 1].any()


def test_ratio_and_p_max(star3_q7):
    assert ratio_R(star3_q7, 0) == pytest.approx(1.0 / 6, abs=1e-12)
    assert p_max(star3_q7, 2) == pytest.approx(1.0 / 7, abs=1e-12)


def test_is_extendable(path4_q5):
    assert is_extendable(path4_q5, PartialColoring.of({0: 1, 2: 1}))
    assert not is_extendable(path4_q5, PartialColoring.of({0: 1, 1: 1}))
    tight = build_instance([(0, 1), (1, 2)], [[1, 2], [1, 2], [1, 2]], 2)
    # 0 and 2 must share a color through the middle vertex
    assert not is_extendable(tight, PartialColoring.of({0: 1, 2: 2}))


def test_sample_uniform_coloring_is_proper(uneven_lists):
    rng = np.random.default_rng(3)
    for _ in range(20):
        assert uneven_lists.is_proper(sample_uniform_coloring(uneven_lists, rng).tolist())


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_conditionals_average_back_to_marginals(seed):
    graph = random_triangle_free(6, 3, 7, seed=seed)
    instance = random_lists_instance(graph, 6, 3, seed=seed)
    table = marginal_table(instance)
    for v in range(instance.n):
        for w in range(instance.n):
            if w == v:
                continue
            for k in instance.lists[w]:
                total = sum(
                    table[v, c] * conditional_marginal(instance, v, c, w, k)
                    for c in instance.lists[v]
                    if table[v, c] > 0
                )
                assert total == pytest.approx(table[w, k], abs=1e-12)
