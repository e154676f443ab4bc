"""Shared fixtures: small instances with known structure."""

import pytest

from src.core import influence, oracle
from src.core.generators import (
    cycle,
    full_palette_instance,
    path,
    random_lists_instance,
    random_triangle_free,
    star,
)
from src.core.graph_core import build_instance


@pytest.fixture(autouse=True)
def _fresh_caches():
    yield
    oracle.clear_caches()
    influence.clear_caches()


@pytest.fixture
def star3_q7():
    """star(3) with the full palette 1..7; inside the region for eps = 0.1."""
    return full_palette_instance(star(3), 7)


@pytest.fixture
def path4_q5():
    return full_palette_instance(path(4), 5)


@pytest.fixture
def cycle4_q5():
    return full_palette_instance(cycle(4), 5)


@pytest.fixture
def triangle_q7():
    return build_instance([(0, 1), (1, 2), (0, 2)], [range(1, 8)] * 3, 7)


@pytest.fixture
def uneven_lists():
    """A 4-vertex path with different lists, each at least degree + 2."""
    return build_instance(
        [(0, 1), (1, 2), (2, 3)],
        [[1, 2, 3], [1, 2, 3, 4], [2, 3, 4, 5], [1, 4, 5]],
        5,
    )


@pytest.fixture
def random_instance():
    """Factory for seeded triangle-free graphs with lists |L(v)| = q - delta + deg(v)."""

    def build(n, edges, seed, q=5, delta=3):
        graph = random_triangle_free(n, delta, edges, seed=seed)
        return random_lists_instance(graph, q, delta, seed=seed)

    return build
