import pytest
from hypothesis import strategies as st

from dtqw.graph import Graph, WsParams, complete_graph, cycle_graph, generate_ws, star_graph


def acceptance_graphs():
    graphs = {f"ws8_seed{s}": generate_ws(WsParams(8, 2, 0.5, s)) for s in range(10)}
    graphs.update(
        cycle8=cycle_graph(8),
        triangle=cycle_graph(3),
        star3=star_graph(3),
        k4=complete_graph(4),
    )
    return graphs


@pytest.fixture
def triangle():
    return cycle_graph(3)


@pytest.fixture
def cycle8():
    return cycle_graph(8)


@st.composite
def graphs(draw, max_nodes=10):
    """Connected simple graphs: a random tree plus random extra edges."""
    n = draw(st.integers(2, max_nodes))
    edges = {(draw(st.integers(0, i - 1)), i) for i in range(1, n)}
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=2 * n))
    edges.update(extra)
    perm = draw(st.permutations(range(n)))
    return Graph.from_edges(((perm[u], perm[v]) for u, v in edges), n)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
