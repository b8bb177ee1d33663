"""Synthetic benchmark graphs with planted ground-truth clusters.

``generate_planted`` is the equal-size planted-partition model where
``q = d_in / d_out`` sets cluster strength.  ``generate_powerlaw`` is a
simplified LFR-style benchmark: power-law degrees and cluster sizes, each
vertex sending a ``q / (q + 1)`` share of its edges inside its cluster.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .errors import ParameterError
from .graph import Graph, write_edge_list

log = logging.getLogger(__name__)

MAX_STUB_RETRIES = 100


@dataclass(frozen=True)
class PlantedPartitionSpec:
    n: int = 128
    d: float = 16.0
    c: int = 4
    q: float = 4.0
    rng_seed: int = 0

    @property
    def p(self) -> float:
        return self.d / (self.n - 1)

    def intra_probability(self) -> float:
        n, c, q, p = self.n, self.c, self.q, self.p
        return q * p * c * (n - 1) / ((q + 1) * (n - c))

    def inter_probability(self) -> float:
        n, c, q, p = self.n, self.c, self.q, self.p
        return p * c * (n - 1) / (n * (q + 1) * (c - 1))

    def validate(self):
        if self.n < 2:
            raise ParameterError(f"n must be at least 2, got {self.n}")
        if self.c < 2:
            raise ParameterError(f"c must be at least 2 (inter-cluster probability divides by c - 1), got {self.c}")
        if self.n % self.c:
            raise ParameterError(f"c={self.c} must divide n={self.n}")
        if self.n == self.c:
            raise ParameterError("clusters must hold at least two vertices")
        if not self.d > 0:
            raise ParameterError(f"d must be positive, got {self.d}")
        if not self.q > 0:
            raise ParameterError(f"q must be positive, got {self.q}")
        for name, prob in (("intra-cluster", self.intra_probability()),
                           ("inter-cluster", self.inter_probability())):
            if prob > 1:
                raise ParameterError(f"{name} link probability {prob:.4f} exceeds 1 for n={self.n}, d={self.d}, c={self.c}, q={self.q}")


@dataclass(frozen=True)
class PowerLawSpec:
    n: int = 2048
    degree_min: int = 16
    degree_max: int = 128
    cluster_min: int = 16
    cluster_max: int = 256
    exponent_degree: float = 2.0
    exponent_size: float = 1.0
    q: float = 4.0
    rng_seed: int = 0

    def validate(self):
        if not 1 <= self.degree_min <= self.degree_max < self.n:
            raise ParameterError(f"need 1 <= degree_min <= degree_max < n, got {self.degree_min}, {self.degree_max}, n={self.n}")
        if not 2 <= self.cluster_min <= self.cluster_max <= self.n:
            raise ParameterError(f"need 2 <= cluster_min <= cluster_max <= n, got {self.cluster_min}, {self.cluster_max}, n={self.n}")
        if not self.q > 0:
            raise ParameterError(f"q must be positive, got {self.q}")


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    graph: Graph
    labels: np.ndarray

    def communities(self) -> list[list[int]]:
        return [np.flatnonzero(self.labels == k).tolist() for k in np.unique(self.labels)]

    def intra_inter_edges(self) -> tuple[int, int]:
        e = self.graph.edges()
        same = self.labels[e[:, 0]] == self.labels[e[:, 1]]
        return int(same.sum()), int((~same).sum())


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 63-bit seed for stream ``keys`` under a master ``seed``."""
    state = np.random.SeedSequence(seed, spawn_key=keys).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 31 | int(state[1]) >> 1


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2,)))


def generate_planted(spec: PlantedPartitionSpec) -> LabeledGraph:
    """Equal-size planted partition, one Bernoulli draw per vertex pair."""
    spec.validate()
    rng = _rng(spec.rng_seed)
    n = spec.n
    labels = np.repeat(np.arange(spec.c), n // spec.c)
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(labels[iu] == labels[ju], spec.intra_probability(), spec.inter_probability())
    keep = rng.random(len(iu)) < prob
    g = Graph.from_edges(n, np.column_stack([iu[keep], ju[keep]]))
    return LabeledGraph(g, labels)


def truncated_power_law(rng: np.random.Generator, size, lo: int, hi: int, exponent: float) -> np.ndarray:
    """Integers in ``[lo, hi]`` with ``P(k)`` proportional to ``k ** -exponent``."""
    k = np.arange(lo, hi + 1)
    w = k.astype(float) ** -exponent
    return rng.choice(k, size=size, p=w / w.sum())


def _cluster_sizes(rng, spec: PowerLawSpec) -> list[int]:
    sizes: list[int] = []
    total = 0
    while total < spec.n:
        s = int(truncated_power_law(rng, None, spec.cluster_min, spec.cluster_max, spec.exponent_size))
        s = min(s, spec.n - total)
        sizes.append(s)
        total += s
    if sizes[-1] < spec.cluster_min and len(sizes) > 1:
        # a clipped remainder too small to be a cluster joins the smallest other cluster
        tail = sizes.pop()
        sizes[int(np.argmin(sizes))] += tail
    return sizes


def _match_stubs(rng, stubs: list[int], ok) -> list[tuple[int, int]]:
    """Pair stubs uniformly at random, rejecting pairs with ``ok(u, v) == False``.

    A stub that finds no acceptable partner within the retry budget is dropped.
    """
    pool = list(stubs)
    rng.shuffle(pool)
    edges = []
    while len(pool) >= 2:
        u = pool.pop()
        for _ in range(MAX_STUB_RETRIES):
            j = int(rng.integers(len(pool)))
            v = pool[j]
            if ok(u, v):
                pool[j] = pool[-1]
                pool.pop()
                edges.append((u, v))
                break
    return edges


def generate_powerlaw(spec: PowerLawSpec) -> LabeledGraph:
    """Power-law degree and cluster-size benchmark.

    Degrees and cluster sizes are drawn from truncated power laws.  Each
    vertex gets ``round(k q / (q + 1))`` intra-cluster stubs and the rest
    inter-cluster; vertices are placed (largest intra degree first) into a
    random cluster big enough to hold them.  When only smaller clusters
    have room left, the vertex's intra degree is cut to fit and the
    surplus goes to its inter-cluster degree.  Stubs are then matched with
    rejection of self-loops, multi-edges and wrong-side partners.
    """
    spec.validate()
    rng = _rng(spec.rng_seed)
    n, q = spec.n, spec.q
    degrees = truncated_power_law(rng, n, spec.degree_min, spec.degree_max, spec.exponent_degree)
    k_in = np.rint(degrees * q / (q + 1)).astype(int)
    k_out = degrees - k_in
    sizes = _cluster_sizes(rng, spec)
    if k_in.max() > max(sizes) - 1:
        raise ParameterError(f"an intra-cluster degree of {k_in.max()} needs a cluster of at least "
                             f"{k_in.max() + 1} vertices; largest drawn cluster has {max(sizes)}")

    size_arr = np.array(sizes)
    free = size_arr.copy()
    labels = np.full(n, -1, dtype=np.int64)
    order = np.lexsort((rng.random(n), -k_in))
    squeezed = 0
    for v in order:
        fits = np.flatnonzero((free > 0) & (size_arr - 1 >= k_in[v]))
        if len(fits) == 0:
            # only clusters too small for this vertex have room left: it moves the
            # surplus of its intra-cluster degree to the inter-cluster side
            fits = np.flatnonzero(free > 0)
        c = int(fits[rng.choice(len(fits), p=free[fits] / free[fits].sum())])
        if k_in[v] > size_arr[c] - 1:
            squeezed += 1
            k_out[v] += k_in[v] - (size_arr[c] - 1)
            k_in[v] = size_arr[c] - 1
        labels[v] = c
        free[c] -= 1
    if squeezed:
        log.warning("%d vertices had more intra-cluster degree than their cluster allows; "
                    "the surplus became inter-cluster degree", squeezed)

    seen: set[tuple[int, int]] = set()

    def fresh(u, v):
        if u == v:
            return False
        key = (u, v) if u < v else (v, u)
        if key in seen:
            return False
        seen.add(key)
        return True

    edges = []
    for c in range(len(sizes)):
        members = np.flatnonzero(labels == c)
        stubs = np.repeat(members, k_in[members]).tolist()
        edges += _match_stubs(rng, stubs, fresh)
    stubs = np.repeat(np.arange(n), k_out).tolist()
    edges += _match_stubs(rng, stubs, lambda u, v: labels[u] != labels[v] and fresh(u, v))
    g = Graph.from_edges(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))
    return LabeledGraph(g, labels)


def write_labels(lg: LabeledGraph, stream: TextIO) -> None:
    for v, c in enumerate(lg.labels.tolist()):
        stream.write(f"{lg.graph.ids[v]}\t{c}\n")


def write_labeled_graph(lg: LabeledGraph, edges_path, labels_path) -> None:
    with open(edges_path, "w", encoding="utf-8") as fh:
        write_edge_list(lg.graph, fh)
    with open(labels_path, "w", encoding="utf-8") as fh:
        write_labels(lg, fh)


def mean_degree(g: Graph) -> float:
    return 2.0 * g.m / g.n if g.n else math.nan
