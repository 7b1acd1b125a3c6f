import numpy as np
import pytest

from wdassort.graph import build_graph

TOY_LABELS = "ABCDEFGH"
TOY_EDGES = [("C", "A", 1), ("D", "A", 2), ("A", "E", 3), ("B", "F", 4),
             ("A", "B", 10), ("B", "G", 5), ("H", "B", 6)]


def toy_graph():
    idx = {c: k for k, c in enumerate(TOY_LABELS)}
    return build_graph([(idx[s], idx[t], w) for s, t, w in TOY_EDGES], len(TOY_LABELS))


@pytest.fixture
def toy():
    return toy_graph()


def random_edges(rng, n, density=0.3, integer=False, max_weight=10.0):
    edges = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < density:
                w = float(rng.integers(1, int(max_weight) + 1)) if integer else rng.uniform(0.01, max_weight)
                edges.append((i, j, w))
    return edges


def random_graphs(count, seed=0, n_max=20, integer=False):
    """Deterministic stream of small random digraphs with at least two edges."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(3, n_max + 1))
        edges = random_edges(rng, n, density=rng.uniform(0.1, 0.6), integer=integer)
        if len(edges) >= 2:
            out.append(build_graph(edges, n))
    return out


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
