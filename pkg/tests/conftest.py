"""Shared oracles and graph builders for the test suite.

The dense oracle builds ``(I + A)`` and ``(I + D)`` as full matrices and
multiplies with an explicit inverse; it shares no code with ``lrw.engine``.
"""

import numpy as np
import pytest

from lrw.graph import Graph


def dense_transition(adj: np.ndarray) -> np.ndarray:
    n = len(adj)
    eye = np.eye(n)
    return (eye + adj) @ np.linalg.inv(eye + np.diag(adj.sum(axis=0)))


def dense_lrw(adj: np.ndarray, seed: int, r: float, steps: int) -> list[np.ndarray]:
    """Iterates x^(1..steps) of the unpruned map, all in dense arithmetic."""
    P = dense_transition(adj)
    x = np.zeros(len(adj))
    x[seed] = 1.0
    out = []
    for _ in range(steps):
        y = (P @ x) ** r
        x = y / y.sum()
        out.append(x)
    return out


def random_adjacency(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    upper = np.triu(rng.random((n, n)) < p, k=1)
    return (upper | upper.T).astype(float)


def graph_from_adjacency(adj: np.ndarray) -> Graph:
    iu, ju = np.nonzero(np.triu(adj, k=1))
    return Graph.from_edges(len(adj), np.column_stack([iu, ju]))


def ring(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def clique_edges(vertices):
    vs = list(vertices)
    return [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]]


def barbell(k: int) -> Graph:
    """Two k-cliques joined by the single edge (k-1, k)."""
    edges = clique_edges(range(k)) + clique_edges(range(k, 2 * k)) + [(k - 1, k)]
    return Graph.from_edges(2 * k, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance report: one line per criterion, printed after the run

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number, ok, detail):
    status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
    line = f"criterion {number}: {status}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
