from __future__ import annotations

from hypothesis import strategies as st

from tuttelab.graphs import Graph


@st.composite
def small_graphs(draw, max_vertices=5, max_edges=7):
    n = draw(st.integers(1, max_vertices))
    m = draw(st.integers(0, max_edges))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), min_size=m, max_size=m))
    return Graph(n, tuple(edges))
