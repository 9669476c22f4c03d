import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from aclsim.graph import AttributedGraph, default_schema

SCHEMA = default_schema()
PROFILES = list(itertools.product(*(values for _, values in SCHEMA.attributes)))
SAME = ("male", "Google", "York")

ACCEPTANCE_LINES: list[str] = []


def make_graph(n, edges, profiles=None):
    if profiles is None:
        profiles = {i: SAME for i in range(n)}
    elif not isinstance(profiles, dict):
        profiles = dict(enumerate(profiles))
    return AttributedGraph(SCHEMA, profiles, edges)


def two_triangles(profiles=None):
    return make_graph(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)], profiles)


def random_graph(rng, n, p, connected=False, profiles=False):
    while True:
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        prof = (
            [PROFILES[rng.integers(len(PROFILES))] for _ in range(n)] if profiles else None
        )
        g = make_graph(n, edges, prof)
        if not connected or len(g.connected_components()) == 1:
            return g


@st.composite
def graphs(draw, min_nodes=1, max_nodes=9):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    prof = draw(st.lists(st.sampled_from(PROFILES), min_size=n, max_size=n))
    return make_graph(n, chosen, prof)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
