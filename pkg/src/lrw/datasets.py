"""Zachary's karate club network with the 1970 club split.

Vertex ids are 0-based (member 1 in the original study is vertex 0).
"""

import io

from .graph import Graph, load_edge_list

KARATE_EDGES = [
    "0 1", "0 2", "0 3", "0 4", "0 5", "0 6", "0 7", "0 8",
    "0 10", "0 11", "0 12", "0 13", "0 17", "0 19", "0 21", "0 31",
    "1 2", "1 3", "1 7", "1 13", "1 17", "1 19", "1 21", "1 30",
    "2 3", "2 7", "2 8", "2 9", "2 13", "2 27", "2 28", "2 32",
    "3 7", "3 12", "3 13", "4 6", "4 10", "5 6", "5 10", "5 16",
    "6 16", "8 30", "8 32", "8 33", "9 33", "13 33", "14 32", "14 33",
    "15 32", "15 33", "18 32", "18 33", "19 33", "20 32", "20 33", "22 32",
    "22 33", "23 25", "23 27", "23 29", "23 32", "23 33", "24 25", "24 27",
    "24 31", "25 31", "26 29", "26 33", "27 33", "28 31", "28 33", "29 32",
    "29 33", "30 32", "30 33", "31 32", "31 33", "32 33",
]

# members who followed the instructor ("Mr. Hi"); everyone else followed the officer
KARATE_INSTRUCTOR_FACTION = frozenset({0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 12, 13, 16, 17, 19, 21})


def karate_edge_list_text() -> str:
    return "".join(e + "\n" for e in KARATE_EDGES)


def karate_club() -> Graph:
    """The 34-vertex, 78-edge karate club graph; original ids equal compact ids."""
    g = load_edge_list(io.StringIO(karate_edge_list_text()))
    # the first line is "0 1" and ids appear in order, but reindex to be safe
    order = sorted(range(g.n), key=lambda v: g.ids[v])
    mapping = {old: new for new, old in enumerate(order)}
    edges = [(mapping[u], mapping[v]) for u, v in g.edges()]
    return Graph.from_edges(g.n, edges)


def karate_split() -> list[list[int]]:
    """The documented two-way split as two sorted vertex lists."""
    hi = sorted(KARATE_INSTRUCTOR_FACTION)
    officer = sorted(set(range(34)) - KARATE_INSTRUCTOR_FACTION)
    return [hi, officer]
