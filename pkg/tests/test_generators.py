import pytest

from src.core.errors import BadParamsError
from src.core.generators import (
    build_graph,
    complete_bipartite,
    cycle,
    full_palette_instance,
    grid,
    parse_generator_spec,
    random_bipartite,
    random_lists_instance,
    random_triangle_free,
    star,
)
from src.core.graph_core import is_delta_q_instance, is_triangle_free


def test_fixed_families():
    assert star(3).edges() == [(0, 1), (0, 2), (0, 3)]
    assert cycle(5).edge_count == 5
    lattice = grid(2, 3)
    assert lattice.n == 6 and lattice.edge_count == 7
    assert lattice.max_degree == 3
    assert complete_bipartite(2, 3).edge_count == 6


def test_cycle_of_three_is_a_triangle(caplog):
    with caplog.at_level("WARNING"):
        triangle = cycle(3)
    assert not is_triangle_free(triangle)
    assert "triangle" in caplog.text
    with pytest.raises(BadParamsError):
        cycle(2)


def test_random_families_are_seeded():
    assert random_bipartite(4, 4, 0.5, seed=3).edges() == random_bipartite(4, 4, 0.5, seed=3).edges()
    first = random_triangle_free(12, 3, 15, seed=8)
    assert first.edges() == random_triangle_free(12, 3, 15, seed=8).edges()
    assert is_triangle_free(first)
    assert first.max_degree <= 3
    with pytest.raises(BadParamsError):
        random_bipartite(2, 2, 1.5)


def test_random_triangle_free_warns_when_short(caplog):
    with caplog.at_level("WARNING"):
        graph = random_triangle_free(4, 1, 10, seed=0)
    assert graph.edge_count == 2
    assert "placed 2 of 10" in caplog.text


def test_random_lists_meet_the_size_condition():
    graph = grid(3, 3)
    instance = random_lists_instance(graph, 9, 4, seed=1)
    for v in range(graph.n):
        assert len(instance.lists[v]) == 9 - 4 + graph.degree(v)
    assert is_delta_q_instance(instance, 4, 9)
    assert instance == random_lists_instance(graph, 9, 4, seed=1)
    padded = random_lists_instance(graph, 9, 4, seed=1, min_list_size=8)
    assert min(len(colors) for colors in padded.lists) == 8
    with pytest.raises(BadParamsError):
        random_lists_instance(graph, 9, 3)


def test_full_palette():
    instance = full_palette_instance(star(2), 4)
    assert instance.lists == ((1, 2, 3, 4),) * 3
    with pytest.raises(BadParamsError):
        full_palette_instance(star(2), 0)


@pytest.mark.parametrize(
    "text, n, edges",
    [
        ("star:3", 4, 3),
        ("path:5", 5, 4),
        ("cycle:6", 6, 6),
        ("grid:3x3", 9, 12),
        ("complete_bipartite:2x3", 5, 6),
    ],
)
def test_parse_and_build(text, n, edges):
    graph = build_graph(parse_generator_spec(text))
    assert graph.n == n
    assert graph.edge_count == edges


def test_parse_options():
    spec = parse_generator_spec("random_triangle_free:n=8,max_degree=3,edges=10", seed=4)
    assert spec.to_dict() == {"family": "random_triangle_free",
                              "params": {"n": 8, "max_degree": 3, "edges": 10}, "seed": 4}
    assert parse_generator_spec("random_bipartite:3x4:p=0.25").param("p") == 0.25
    assert parse_generator_spec("random_bipartite:3x4").param("p") == 0.5


@pytest.mark.parametrize("text", ["hypercube:3", "grid:3", "star:x", "random_triangle_free:max_degree=3", "cycle:4:5"])
def test_parse_rejects_malformed_specs(text):
    with pytest.raises(BadParamsError):
        parse_generator_spec(text)
