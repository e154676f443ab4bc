import math

import numpy as np
import pytest

from src.core.errors import BadParamsError, ColorNotInListError
from src.core.generators import full_palette_instance, path, random_lists_instance, random_triangle_free, star
from src.core.graph_core import build_instance, derive_collection, in_region, is_delta_q_instance, region_params
from src.core.influence import (
    aggregate_recursion_reports,
    biased_influence,
    biased_recursion_reports,
    influence_arrays,
    influence_matrix,
    jhat_influence,
    max_influence,
    phi,
    recursion_identity_reports,
    total_biased_influence,
    total_influence,
    verify_entry_below_influence,
    verify_induced_collections,
    verify_jhat_bounds,
    verify_marginal_ratio_bounds,
    verify_one_step_bounds,
    verify_phi_region,
    verify_recursion_identity,
    verify_row_sum_bound,
    verify_total_bounds,
)
from src.utils.config import DEFAULT_EPSILONS

STAR_CASES = [(delta, q) for delta in (3, 4, 5) for q in range(delta + 2, 13)]


@pytest.mark.parametrize("delta, q", STAR_CASES)
def test_star_closed_forms(delta, q):
    instance = full_palette_instance(star(delta), q)
    matrix = influence_matrix(instance)
    for k in range(1, q + 1):
        assert max_influence(instance, 0, 1, k) == pytest.approx(1.0 / (q - 1), abs=1e-12)
    assert matrix.entry(0, 1, 2, 3) == pytest.approx(1.0 / (q * (q - 1)), abs=1e-12)
    assert matrix.entry(0, 2, 1, 2) == pytest.approx(-1.0 / q, abs=1e-12)
    center_rows = [a for a, (v, _) in enumerate(matrix.index) if v == 0]
    np.testing.assert_allclose(matrix.row_l1()[center_rows], 2.0 * delta / q, atol=1e-12)
    raw = influence_arrays(instance).maximum[0, 1:, 1:].sum()
    assert raw == pytest.approx(q * delta / (q - 1), abs=1e-12)
    assert total_influence(instance, 0) == pytest.approx(q / (q - 1), abs=1e-12)


def test_star_biased_influences_vanish(star3_q7):
    # pinning the center to any color other than k gives the same leaf marginal
    assert biased_influence(star3_q7, 0, 1, 4) == pytest.approx(0.0, abs=1e-15)
    assert total_biased_influence(star3_q7, 0) == pytest.approx(0.0, abs=1e-15)
    assert jhat_influence(star3_q7, 0, 1, 4) == pytest.approx(1.0 / 6 - 1.0 / 7, abs=1e-12)


def test_diagonal_block_of_m_is_zero(uneven_lists):
    matrix = influence_matrix(uneven_lists)
    for a, (v, _) in enumerate(matrix.index):
        assert not np.any(matrix.entries[a, matrix.block_indicator(v) > 0])


def test_collection_influence_is_member_maximum(star3_q7):
    collection = derive_collection(star3_q7, 0)
    combined = influence_arrays(collection).maximum
    for member in collection.members():
        assert np.all(influence_arrays(member).maximum <= combined + 1e-15)


def test_entry_below_influence(uneven_lists, cycle4_q5):
    for instance in (uneven_lists, cycle4_q5):
        report = verify_entry_below_influence(instance)
        assert report.passed, report


@pytest.mark.parametrize("fixture", ["star3_q7", "uneven_lists", "cycle4_q5"])
def test_recursion_identity_holds_everywhere(fixture, request):
    instance = request.getfixturevalue(fixture)
    reports = recursion_identity_reports(instance)
    assert reports
    worst = max(r.residual for r in reports)
    assert worst <= 1e-12
    assert {r.context["orientation"] for r in reports} <= {"i_minus_j", "j_minus_i"}


def test_recursion_identity_argument_checks(star3_q7):
    with pytest.raises(ColorNotInListError):
        verify_recursion_identity(star3_q7, 0, 1, 9, 1, 1)
    with pytest.raises(BadParamsError):
        verify_recursion_identity(star3_q7, 0, 1, 1, 1, 1)
    with pytest.raises(BadParamsError):
        verify_recursion_identity(star3_q7, 0, 1, 2, 0, 1)


def test_recursion_identity_budget_sampling(uneven_lists):
    sampled = recursion_identity_reports(uneven_lists, budget=25, seed=4)
    assert len(sampled) <= 25
    again = recursion_identity_reports(uneven_lists, budget=25, seed=4)
    assert [r.context for r in sampled] == [r.context for r in again]


@pytest.mark.parametrize("fixture", ["star3_q7", "path4_q5", "uneven_lists"])
def test_aggregate_and_biased_recursions(fixture, request):
    instance = request.getfixturevalue(fixture)
    reports = aggregate_recursion_reports(instance) + biased_recursion_reports(instance)
    assert reports
    failed = [r for r in reports if not r.passed]
    assert not failed, failed


def test_jhat_bounds(uneven_lists, star3_q7):
    for instance in (uneven_lists, star3_q7):
        assert all(r.passed for r in verify_jhat_bounds(instance))


def test_row_sum_bound_on_star(star3_q7):
    by_totals, by_constant, same_color = verify_row_sum_bound(star3_q7, 0.1)
    assert by_totals.passed and by_constant.passed and same_color.passed
    assert by_constant.bound == pytest.approx(64 * 11 ** 2 * 3 / 7)
    assert {"v", "i"} <= set(by_totals.context)


def test_row_sum_bound_warns_outside_region(star3_q7, caplog):
    with caplog.at_level("WARNING"):
        verify_row_sum_bound(star3_q7, 1.0, delta=5)
    assert "outside its region" in caplog.text


def test_marginal_ratio_bounds(star3_q7):
    reports = verify_marginal_ratio_bounds(star3_q7, 0.1)
    assert [r.quantity for r in reports] == [
        "ratio_vs_min_bound",
        "ratio_vs_phi_bound",
        "marginal_vs_list_slack",
        "list_slack_vs_palette_slack",
        "ratio_vs_palette_slack",
    ]
    assert all(r.passed for r in reports)
    # only the leaves have degree at most Delta - 1
    assert reports[0].context["checked"] == 3 * 7
    assert reports[0].value == pytest.approx(1.0 / 6, abs=1e-12)


def test_phi_values():
    m = 7 - 3 + 1
    expected = (5 / 2) * ((1 - 1 / m) ** m) ** (2 / 5)
    assert phi(3, 7) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(BadParamsError):
        phi(3, 3)
    with pytest.raises(BadParamsError):
        phi(2, 7)


@pytest.mark.parametrize("epsilon", DEFAULT_EPSILONS)
def test_phi_region_grid(epsilon):
    report, rows = verify_phi_region(epsilon)
    assert report.passed
    assert all(row["passed"] for row in rows)
    if epsilon < 0.6:
        assert rows
    else:
        # alpha > 3 leaves no q between alpha Delta + beta and 3 Delta
        assert rows == [] and report.context["checked"] == 0
    assert all(3 <= row["delta"] <= 50 and row["q"] <= 3 * row["delta"] for row in rows)


def test_total_bounds(star3_q7):
    plain = verify_total_bounds(star3_q7, 0.1)
    biased = verify_total_bounds(star3_q7, 0.1, biased=True)
    assert plain.passed and plain.bound == pytest.approx(44.0)
    assert biased.passed and biased.bound == pytest.approx(16 / 7 * 11 ** 2)


@pytest.mark.parametrize("biased", [False, True])
def test_one_step_bounds(star3_q7, biased):
    reports = verify_one_step_bounds(star3_q7, 0.1, biased=biased)
    assert len(reports) == 4
    assert all(r.passed for r in reports)


def test_induced_collections(star3_q7):
    report = verify_induced_collections(star3_q7, 3, 7)
    assert report.passed
    assert report.context["checked"] > 0


def test_path_influence_decays_with_distance():
    instance = full_palette_instance(path(5), 4)
    arrays = influence_arrays(instance)
    near = arrays.maximum[0, 1, 1:].max()
    far = arrays.maximum[0, 4, 1:].max()
    assert far < near
    assert math.isfinite(total_influence(instance, 0))


def region_instances(epsilon):
    """Triangle-free (3, q)-instances with q just inside the region for epsilon."""
    q = math.ceil(region_params(epsilon).threshold(3))
    graphs = [star(3), path(4), random_triangle_free(5, 3, 5, seed=1)]
    return [full_palette_instance(graphs[0], q)] + [random_lists_instance(g, q, 3, seed=7) for g in graphs[1:]]


@pytest.mark.parametrize("epsilon", DEFAULT_EPSILONS)
def test_inequality_suite_inside_the_region(epsilon):
    for instance in region_instances(epsilon):
        assert in_region(3, instance.q, epsilon)
        assert is_delta_q_instance(instance, 3, instance.q)
        reports = (
            verify_marginal_ratio_bounds(instance, epsilon, delta=3)
            + verify_row_sum_bound(instance, epsilon, delta=3)
            + [verify_total_bounds(instance, epsilon), verify_total_bounds(instance, epsilon, biased=True)]
        )
        failed = [r for r in reports if not r.passed]
        assert not failed, failed


@pytest.mark.parametrize("epsilon", DEFAULT_EPSILONS)
def test_inequality_suite_on_derived_members(epsilon):
    instance = region_instances(epsilon)[1]
    collection = derive_collection(instance, 1)
    members = list(collection.members())[:4]
    assert members
    for member in members:
        assert is_delta_q_instance(member, 3, instance.q)
        reports = verify_marginal_ratio_bounds(member, epsilon, delta=3) + [verify_total_bounds(member, epsilon)]
        assert all(r.passed for r in reports)


@pytest.mark.parametrize("seed", range(4))
def test_induced_collections_on_generated_instances(seed, random_instance):
    instance = random_instance(6, 7, seed, q=6)
    report = verify_induced_collections(instance, 3, 6)
    assert report.passed, report.context
    assert report.context["checked"] > 0


@pytest.mark.parametrize("seed", range(3))
def test_influences_do_not_depend_on_vertex_order(seed, random_instance):
    instance = random_instance(5, 5, seed)
    perm = np.random.default_rng(seed).permutation(instance.n)
    relabelled_lists = [None] * instance.n
    for v in range(instance.n):
        relabelled_lists[perm[v]] = instance.lists[v]
    relabelled = build_instance(
        [(int(perm[u]), int(perm[v])) for u, v in instance.graph.edges()], relabelled_lists, instance.q
    )
    before = influence_arrays(instance)
    after = influence_arrays(relabelled)
    for name in ("maximum", "biased"):
        original = getattr(before, name)
        moved = getattr(after, name)[np.ix_(perm, perm)]
        np.testing.assert_allclose(moved, original, atol=1e-12)
        assert getattr(after, name).max() == pytest.approx(original.max(), abs=1e-12)


@pytest.mark.parametrize("fixture", ["star3_q7", "uneven_lists", "cycle4_q5"])
def test_deduplication_keeps_collection_influences(fixture, request):
    instance = request.getfixturevalue(fixture)
    for v in range(instance.n):
        deduped = derive_collection(instance, v)
        everything = derive_collection(instance, v, dedup=False)
        assert len(deduped) <= len(everything)
        for name in ("maximum", "biased"):
            np.testing.assert_array_equal(
                getattr(influence_arrays(deduped), name), getattr(influence_arrays(everything), name)
            )
