"""Clustering quality measures: NMI, conductance, Jaccard, sampled Rand index."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import GraphFormatError, ParameterError
from .graph import Graph

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Reference communities; a vertex may belong to several."""

    communities: list[list[int]]

    def __post_init__(self):
        for k, c in enumerate(self.communities):
            if len(c) == 0:
                raise ValueError(f"ground-truth community {k} is empty")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "GroundTruth":
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(np.asarray(labels).tolist()):
            if lab is None or lab < 0:
                continue
            groups.setdefault(lab, []).append(v)
        return cls([groups[k] for k in sorted(groups)])

    def membership(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for k, c in enumerate(self.communities):
            for v in c:
                out.setdefault(v, []).append(k)
        return out

    def vertices(self) -> set[int]:
        return {v for c in self.communities for v in c}


def _as_partition(pred) -> np.ndarray:
    """Accept a Clustering, a label vector or a list of vertex sets."""
    if hasattr(pred, "assignment"):
        return np.asarray(pred.assignment)
    if isinstance(pred, np.ndarray):
        return pred
    pred = list(pred)
    if pred and isinstance(pred[0], (set, frozenset, list, tuple, np.ndarray)):
        n = 1 + max((max(c) for c in pred if len(c)), default=-1)
        out = np.full(n, -1, dtype=np.int64)
        for k, c in enumerate(pred):
            out[list(c)] = k
        return out
    return np.asarray(pred)


def _as_truth(truth) -> GroundTruth:
    if isinstance(truth, GroundTruth):
        return truth
    return GroundTruth.from_labels(_as_partition(truth))


def confusion_matrix(pred, truth) -> np.ndarray:
    """Rows are predicted clusters, columns ground-truth communities.

    Only vertices that are both predicted and in some community count.
    Empty rows (predicted clusters with no evaluated vertex) are dropped.
    """
    labels = _as_partition(pred)
    truth = _as_truth(truth)
    evaluated = sorted(v for v in truth.vertices() if v < len(labels) and labels[v] >= 0)
    row_ids = {lab: i for i, lab in enumerate(sorted({int(labels[v]) for v in evaluated}))}
    counts = np.zeros((len(row_ids), len(truth.communities)), dtype=np.int64)
    ev = set(evaluated)
    for j, com in enumerate(truth.communities):
        for v in com:
            if v in ev:
                counts[row_ids[int(labels[v])], j] += 1
    return counts


def nmi_from_confusion(counts: np.ndarray, n: int | None = None) -> float:
    """Normalised mutual information of a confusion matrix (natural log).

    ``n`` is the number of evaluated vertices; it defaults to the matrix
    total, which differs only when ground-truth communities overlap.
    """
    counts = np.asarray(counts, dtype=float)
    counts = counts[:, counts.sum(axis=0) > 0]
    counts = counts[counts.sum(axis=1) > 0]
    N = float(counts.sum()) if n is None else float(n)
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    denom = np.sum(rows * np.log(rows / N)) + np.sum(cols * np.log(cols / N))
    if denom == 0:
        warnings.warn("NMI undefined for two trivial partitions; reporting 0", RuntimeWarning, stacklevel=2)
        return 0.0
    i, j = np.nonzero(counts)
    nij = counts[i, j]
    num = -2.0 * np.sum(nij * np.log(nij * N / (rows[i] * cols[j])))
    return float(num / denom)


def nmi(pred, truth) -> float:
    """NMI between a predicted partition and ground truth.

    Vertices outside the ground truth are ignored.  With overlapping
    communities a vertex counts once towards N but in every column it
    belongs to.
    """
    labels = _as_partition(pred)
    truth = _as_truth(truth)
    n = sum(1 for v in truth.vertices() if v < len(labels) and labels[v] >= 0)
    return nmi_from_confusion(confusion_matrix(labels, truth), n)


def _cut_and_volume(g: Graph, cluster) -> tuple[int, int, int]:
    inside = np.zeros(g.n, dtype=bool)
    inside[np.asarray(list(cluster), dtype=np.int64)] = True
    src = np.repeat(inside, g.degrees)
    cut = int(np.sum(src & ~inside[g.neighbors]))
    vol = int(g.degrees[inside].sum())
    return cut, vol, int(g.degrees.sum()) - vol


def conductance(g: Graph, cluster: Iterable[int]) -> float:
    """Cut size over the smaller of the two sides' total degree."""
    cluster = set(int(v) for v in cluster)
    if not cluster or len(cluster) >= g.n:
        raise ValueError("conductance needs a nonempty proper subset of the vertices")
    cut, vol, rest = _cut_and_volume(g, cluster)
    denom = min(vol, rest)
    if denom == 0:
        # a side with no edges: no cut is possible either
        return 0.0
    return cut / denom


def mean_conductance(g: Graph, pred) -> float:
    """Mean conductance over predicted clusters; clusters covering V are skipped."""
    labels = _as_partition(pred)
    values = []
    for lab in np.unique(labels[labels >= 0]):
        members = np.flatnonzero(labels == lab)
        if len(members) >= g.n:
            warnings.warn("cluster covers every vertex; conductance undefined, skipped", RuntimeWarning, stacklevel=2)
            continue
        values.append(conductance(g, members))
    if not values:
        return math.nan
    return float(np.mean(values))


def jaccard(found: Iterable[int], truth: Iterable[int]) -> float:
    a, b = set(found), set(truth)
    if not a and not b:
        raise ValueError("jaccard of two empty sets")
    return len(a & b) / len(a | b)


def _pair_counts(labels, truth: GroundTruth):
    """Exhaustive positive and negative pairs among evaluated vertices."""
    member = truth.membership()
    verts = sorted(v for v in member if v < len(labels) and labels[v] >= 0)
    pos, neg = [], []
    for a in range(len(verts)):
        u = verts[a]
        cu = set(member[u])
        for b in range(a + 1, len(verts)):
            v = verts[b]
            (pos if cu.intersection(member[v]) else neg).append((u, v))
    return pos, neg


def rand_index_sampled(pred, truth, pairs_per_class: int | None = 1000, rng_seed: int = 0) -> float:
    """Rand index over sampled same-community and different-community pairs.

    ``pairs_per_class`` positive pairs are drawn uniformly from pairs that
    share a ground-truth community, and as many negative pairs from pairs
    that share none.  ``None`` uses every pair of each class instead, which
    is the ordinary Rand index over evaluated vertices.
    """
    labels = _as_partition(pred)
    truth = _as_truth(truth)
    member = truth.membership()
    verts = np.array(sorted(v for v in member if v < len(labels) and labels[v] >= 0), dtype=np.int64)
    if pairs_per_class is None:
        pos, neg = _pair_counts(labels, truth)
        if not pos or not neg:
            raise ParameterError("need at least one same-community and one cross-community pair")
        tp = sum(labels[u] == labels[v] for u, v in pos)
        tn = sum(labels[u] != labels[v] for u, v in neg)
        return (tp + tn) / (len(pos) + len(neg))

    if pairs_per_class < 1:
        raise ParameterError("pairs_per_class must be positive")
    vset = set(verts.tolist())
    coms = [np.array([v for v in c if v in vset], dtype=np.int64) for c in truth.communities]
    coms = [c for c in coms if len(c) >= 2]
    if not coms:
        raise ParameterError("no ground-truth community has two evaluated vertices")
    if not _has_negative(verts, member):
        raise ParameterError("every pair of vertices shares a community; no negative pairs exist")
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed, spawn_key=(3,)))
    # community weight = its number of pairs, so positives are uniform over (community, pair)
    sizes = np.array([len(c) for c in coms], dtype=float)
    w = sizes * (sizes - 1)
    w /= w.sum()
    tp = 0
    for k in rng.choice(len(coms), size=pairs_per_class, p=w):
        u, v = rng.choice(coms[k], size=2, replace=False)
        tp += labels[u] == labels[v]
    tn = 0
    drawn = attempts = 0
    while drawn < pairs_per_class:
        attempts += 1
        if attempts > 1000 * pairs_per_class:
            raise ParameterError("cross-community pairs are too rare to sample")
        u, v = rng.choice(verts, size=2, replace=False)
        if not set(member[int(u)]).isdisjoint(member[int(v)]):
            continue
        drawn += 1
        tn += labels[u] != labels[v]
    return float(tp + tn) / (2 * pairs_per_class)


def _has_negative(verts, member) -> bool:
    for a in range(len(verts)):
        ma = set(member[int(verts[a])])
        for b in range(a + 1, len(verts)):
            if ma.isdisjoint(member[int(verts[b])]):
                return True
    return False


# --
# files

def load_communities(stream: TextIO, graph: Graph | None = None) -> GroundTruth:
    """One community per line, whitespace-separated vertex ids.

    With ``graph`` given, ids are original ids and are mapped to compact
    ones; ids absent from the graph are dropped with a warning.
    """
    communities = []
    missing = 0
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            ids = [int(t) for t in s.split()]
        except ValueError:
            raise GraphFormatError(f"non-integer vertex id in {s!r}", lineno) from None
        if graph is not None:
            mapped = []
            for o in ids:
                try:
                    mapped.append(graph.compact_id(o))
                except KeyError:
                    missing += 1
            ids = mapped
        ids = sorted(set(ids))
        if ids:
            communities.append(ids)
    if missing:
        log.warning("%d community member id(s) not in the graph were dropped", missing)
    return GroundTruth(communities)


def load_labels(stream: TextIO, graph: Graph | None = None) -> np.ndarray:
    """Read ``vertex_id <tab> cluster_id`` lines into a label vector (-1 = unlabeled)."""
    pairs = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tokens = s.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"expected 'vertex cluster', got {s!r}", lineno)
        try:
            v, c = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"non-integer field in {s!r}", lineno) from None
        if graph is not None:
            try:
                v = graph.compact_id(v)
            except KeyError:
                raise GraphFormatError(f"vertex {tokens[0]} is not in the graph", lineno) from None
        pairs.append((v, c))
    n = graph.n if graph is not None else 1 + max((v for v, _ in pairs), default=-1)
    labels = np.full(n, -1, dtype=np.int64)
    for v, c in pairs:
        labels[v] = c
    return labels
