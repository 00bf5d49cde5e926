import sys

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from graphnls import WeightedGraph
from graphnls.corpus import complete_graph, cycle_graph, path_graph, random_connected_graph

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def k2():
    return WeightedGraph(["a", "b"], [("a", "b", 1.0)])


@pytest.fixture
def triangle():
    return complete_graph(3)


@pytest.fixture
def p3():
    return WeightedGraph(["a", "b", "c"], [("a", "b", 1.0), ("b", "c", 1.0)])


@pytest.fixture
def c4():
    return cycle_graph(4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(2, max_n))
    seed = draw(st.integers(0, 2**31 - 1))
    return random_connected_graph(n, seed)


@st.composite
def graph_and_function(draw, max_n=10, k=1):
    g = draw(graphs(max_n))
    vals = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
    fns = [np.array(draw(st.lists(vals, min_size=g.n, max_size=g.n))) for _ in range(k)]
    return (g, *fns)


def dense_laplacian(g):
    """-Delta as a dense matrix built straight from the edge list (oracle)."""
    L = np.zeros((g.n, g.n))
    for a, b, w in g.edges:
        i, j = g.index(a), g.index(b)
        L[i, j] -= w
        L[j, i] -= w
        L[i, i] += w
        L[j, j] += w
    mu = L.diagonal().copy()
    return L / mu[:, None], mu


__all__ = ["graphs", "graph_and_function", "dense_laplacian", "path_graph"]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
