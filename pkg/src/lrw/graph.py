"""Undirected simple graphs in compressed adjacency (CSR) form.

Vertices are compact integers ``0..n-1``.  Graphs loaded from edge-list
files keep the original ids in ``Graph.ids`` so results can be written
back in the id space of the input.
"""

from __future__ import annotations

import io
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import GraphFormatError

log = logging.getLogger(__name__)

_DIRECTED_HEADER = re.compile(r"^#\s*directed\b", re.IGNORECASE)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    ``neighbors[offsets[v]:offsets[v + 1]]`` is the sorted adjacency list of
    vertex ``v``.  ``ids[v]`` is the original id of ``v`` (``ids[v] == v``
    for graphs built in memory).
    """

    offsets: np.ndarray
    neighbors: np.ndarray
    ids: np.ndarray = field(default=None)

    def __post_init__(self):
        offsets = np.ascontiguousarray(self.offsets, dtype=np.int64)
        neighbors = np.ascontiguousarray(self.neighbors, dtype=np.int64)
        n = len(offsets) - 1
        ids = np.arange(n, dtype=np.int64) if self.ids is None else np.asarray(self.ids, dtype=np.int64)
        if len(ids) != n:
            raise ValueError("ids must have one entry per vertex")
        for name, arr in (("offsets", offsets), ("neighbors", neighbors), ("ids", ids)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        degrees = np.diff(offsets)
        degrees.setflags(write=False)
        object.__setattr__(self, "_degrees", degrees)
        object.__setattr__(self, "_index", None)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], ids=None) -> "Graph":
        """Build a graph on ``n`` vertices from compact-id edge pairs.

        Self-loops are dropped and duplicates (in either orientation) collapse.
        """
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be pairs")
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"edge endpoint out of range [0, {n})")
        arr = arr[arr[:, 0] != arr[:, 1]]
        both = np.concatenate([arr, arr[:, ::-1]])
        if len(both):
            # unique on the packed key sorts by (src, dst), which is the CSR order
            keys = np.unique(both[:, 0] * n + both[:, 1])
            src, dst = np.divmod(keys, n)
        else:
            src = dst = np.empty(0, dtype=np.int64)
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        return cls(offsets, dst, ids)

    @property
    def n(self) -> int:
        return len(self.offsets) - 1

    @property
    def m(self) -> int:
        return len(self.neighbors) // 2

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def _check(self, v):
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")

    def degree(self, v: int) -> int:
        self._check(v)
        return int(self._degrees[v])

    def neighbors_of(self, v: int) -> np.ndarray:
        self._check(v)
        return self.neighbors[self.offsets[v]:self.offsets[v + 1]]

    def transition_column(self, j: int) -> list[tuple[int, float]]:
        """Column ``j`` of ``P = (I + A)(I + D)^-1`` as sorted ``(vertex, prob)`` pairs."""
        nbrs = self.neighbors_of(j)
        p = 1.0 / (1.0 + len(nbrs))
        verts = np.sort(np.append(nbrs, j))
        return [(int(v), p) for v in verts]

    def edges(self) -> np.ndarray:
        """Each undirected edge once, as an ``(m, 2)`` array with ``u < v``."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self._degrees)
        mask = src < self.neighbors
        return np.column_stack([src[mask], self.neighbors[mask]])

    def compact_id(self, original: int) -> int:
        """Map an original vertex id to its compact index."""
        if self._index is None:
            object.__setattr__(self, "_index", {int(o): i for i, o in enumerate(self.ids)})
        try:
            return self._index[int(original)]
        except KeyError:
            raise KeyError(f"unknown vertex id {original}") from None

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        e = self.edges()
        a[e[:, 0], e[:, 1]] = 1.0
        a[e[:, 1], e[:, 0]] = 1.0
        return a

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (np.array_equal(self.offsets, other.offsets)
                and np.array_equal(self.neighbors, other.neighbors)
                and np.array_equal(self.ids, other.ids))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def load_edge_list(stream: TextIO) -> Graph:
    """Parse a whitespace-separated ``u v`` edge list.

    Lines starting with ``#`` are comments.  Original ids are compacted to
    ``0..n-1`` in order of first appearance; the graph's ``ids`` array maps
    back.  Self-loops are dropped with a warning, duplicate edges collapse.
    Lines with more than two tokens are rejected (weighted input), as is a
    SNAP ``# Directed`` header.
    """
    index: dict[int, int] = {}
    src, dst = [], []
    self_loops = 0
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            if _DIRECTED_HEADER.match(s):
                raise GraphFormatError("directed graphs are not supported", lineno)
            continue
        tokens = s.split()
        if len(tokens) != 2:
            if len(tokens) > 2:
                raise GraphFormatError(f"expected 'u v', got {len(tokens)} tokens (weighted edges are not supported)", lineno)
            raise GraphFormatError(f"expected 'u v', got {s!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"non-integer vertex id in {s!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"negative vertex id in {s!r}", lineno)
        cu = index.setdefault(u, len(index))
        cv = index.setdefault(v, len(index))
        if cu == cv:
            self_loops += 1
            continue
        src.append(cu)
        dst.append(cv)
    if self_loops:
        log.warning("dropped %d self-loop line(s)", self_loops)
    ids = np.fromiter(index.keys(), dtype=np.int64, count=len(index))
    edges = np.column_stack([np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)])
    return Graph.from_edges(len(index), edges, ids=ids)


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def write_edge_list(g: Graph, stream: TextIO) -> None:
    """Write each edge once as ``u v`` in original ids.

    Lines are ordered so that vertices first appear in compact-id order,
    which makes ``load_edge_list`` reproduce the same compaction.  A vertex
    that no edge can introduce in time (isolated ones included) is written
    as a self-loop line ``v v``; the loader registers its id and drops the
    loop.
    """
    ids = g.ids
    written = set()
    lines = []
    seen = 0  # every vertex below this has been introduced
    for k in range(g.n):
        if k < seen:
            continue
        nbrs = g.neighbors_of(k)
        if len(nbrs) and nbrs[0] < k:
            edge = (int(nbrs[0]), k)
            seen = k + 1
        elif len(nbrs) and nbrs[0] == k + 1:
            edge = (k, k + 1)
            seen = k + 2
        else:
            # isolated, or no edge can introduce k at this position
            lines.append((k, k))
            seen = k + 1
            continue
        written.add(edge)
        lines.append(edge)
    for u, v in g.edges():
        edge = (int(u), int(v))
        if edge not in written:
            lines.append(edge)
    for u, v in lines:
        stream.write(f"{ids[u]} {ids[v]}\n")


def serialize(g: Graph) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()


def write_remap(g: Graph, stream: TextIO) -> None:
    """Two-column TSV: original id, compact id."""
    stream.write("original_id\tcompact_id\n")
    for i, o in enumerate(g.ids):
        stream.write(f"{o}\t{i}\n")
