import numpy as np
import pytest
from hypothesis import strategies as st

from socionet.graph import Graph


def random_graph(rng, n, p):
    """Erdos-Renyi graph over ids 0..n-1."""
    upper = np.triu(rng.random((n, n)) < p, 1)
    u, v = np.nonzero(upper)
    return Graph(range(n), np.column_stack([u, v]))


def random_connected_graph(rng, n, p):
    """Random spanning tree plus extra ER edges, so the graph is connected."""
    order = rng.permutation(n)
    tree = [(int(order[i]), int(order[rng.integers(i)])) for i in range(1, n)]
    extra = random_graph(rng, n, p).edges()
    return Graph(range(n), tree + extra)


@st.composite
def graphs(draw, max_nodes=14):
    n = draw(st.integers(0, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(range(n), edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def triangle():
    return Graph([1, 2, 3], [(1, 2), (2, 3), (1, 3)])


def path3():
    return Graph([1, 2, 3], [(1, 2), (2, 3)])
