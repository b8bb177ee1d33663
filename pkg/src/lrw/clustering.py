"""Global and local clustering from limited-random-walk feature vectors.

Each explored seed is keyed by its attractor (the argmax of its feature
vector).  Seeds sharing an attractor form a cluster; clusters whose
significant-vertex sets overlap by more than half merge.  Global
clustering repeats sample/explore/merge rounds until every vertex is
clustered.  Local clustering re-explores the low-probability part of one
seed's walk and keeps what merges back with the seed.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .engine import LrwParams, SparseProbVector, WalkOutcome, explore
from .graph import Graph

log = logging.getLogger(__name__)


@dataclass
class ClusterEntry:
    """Value stored under an attractor key: member seeds and significant vertices.

    ``score`` maps each vertex in ``significant`` to the largest value it
    reached relative to the attractor in any walk merged into this entry.
    """

    attractor: int
    members: set[int]
    significant: set[int]
    score: dict[int, float] = field(default_factory=dict)


@dataclass
class Clustering:
    """A partition of (a subset of) the vertices.

    ``assignment[v]`` is the index into ``clusters`` or -1 if unassigned.
    ``attractors[k]`` is the attractor key cluster ``k`` came from.
    """

    clusters: list[list[int]]
    assignment: np.ndarray
    attractors: list[int] = field(default_factory=list)
    walks: dict[int, WalkOutcome] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    rounds: int = 0

    @classmethod
    def from_assignment(cls, assignment: Sequence[int]) -> "Clustering":
        """Relabel an arbitrary label vector to clusters ordered by smallest member."""
        labels = np.asarray(assignment)
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(labels.tolist()):
            if lab is None or lab == -1:
                continue
            groups.setdefault(lab, []).append(v)
        clusters = sorted(groups.values(), key=lambda c: c[0])
        out = np.full(len(labels), -1, dtype=np.int64)
        for k, c in enumerate(clusters):
            out[c] = k
        return cls(clusters, out)

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    def labels(self) -> np.ndarray:
        return self.assignment


# --
# Exploration fan-out

_worker_graph: Graph | None = None
_worker_params: LrwParams | None = None


def _init_worker(g, params):
    global _worker_graph, _worker_params
    _worker_graph, _worker_params = g, params


def _explore_chunk(seeds):
    return [explore(_worker_graph, s, _worker_params) for s in seeds]


def default_workers() -> int:
    return os.cpu_count() or 1


def explore_many(g: Graph, seeds: Iterable[int], params: LrwParams,
                 workers: int = 1, backend: str = "thread") -> list[WalkOutcome]:
    """Explore every seed; results come back in the order of ``seeds``.

    Walks are independent pure functions of ``(g, seed, params)``, so the
    output does not depend on ``workers`` or ``backend``.
    """
    seeds = [int(s) for s in seeds]
    if workers <= 1 or len(seeds) <= 1:
        return [explore(g, s, params) for s in seeds]
    if backend == "thread":
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda s: explore(g, s, params), seeds))
    if backend == "process":
        chunk = max(1, math.ceil(len(seeds) / (4 * workers)))
        chunks = [seeds[i:i + chunk] for i in range(0, len(seeds), chunk)]
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(g, params)) as pool:
            return [w for part in pool.map(_explore_chunk, chunks) for w in part]
    raise ValueError(f"unknown backend {backend!r}")


# --
# Attractor dictionary and merging

def attractor_and_significant(feature: SparseProbVector, tau: float) -> tuple[int, set[int]]:
    """Return the attractor vertex and every vertex above ``tau`` times its value."""
    if len(feature) == 0:
        raise ValueError("empty feature vector")
    m = feature.argmax()
    top = feature.val.max()
    sig = set(feature.idx[feature.val > tau * top].tolist())
    sig.add(m)
    return m, sig


def merge_into_dictionary(entries: dict[int, ClusterEntry], seed: int,
                          feature: SparseProbVector, tau: float) -> dict[int, ClusterEntry]:
    """Add one explored seed to the attractor dictionary (in place)."""
    m, sig = attractor_and_significant(feature, tau)
    top = feature.val.max()
    rel = feature.val / top
    score = {v: s for v, s in zip(feature.idx.tolist(), rel.tolist()) if v in sig}
    entry = entries.get(m)
    if entry is None:
        entries[m] = ClusterEntry(m, {seed}, sig, score)
    else:
        entry.members.add(seed)
        entry.significant |= sig
        _merge_scores(entry.score, score)
    return entries


def _merge_scores(into, other):
    for v, s in other.items():
        if s > into.get(v, -1.0):
            into[v] = s


def _overlaps(a: set, b: set) -> bool:
    return len(a & b) > 0.5 * min(len(a), len(b))


def merge_overlapping_clusters(entries: dict[int, ClusterEntry]) -> dict[int, ClusterEntry]:
    """Merge entries whose significant sets overlap by more than half (in place).

    Key pairs are scanned in ascending order and full passes repeat until
    nothing merges, so the result does not depend on insertion order.
    """
    changed = True
    while changed:
        changed = False
        keys = sorted(entries)
        alive = set(keys)
        for i, m1 in enumerate(keys):
            if m1 not in alive:
                continue
            e1 = entries[m1]
            for m2 in keys[i + 1:]:
                if m2 not in alive:
                    continue
                e2 = entries[m2]
                if _overlaps(e1.significant, e2.significant):
                    e1.members |= e2.members
                    e1.significant |= e2.significant
                    _merge_scores(e1.score, e2.score)
                    del entries[m2]
                    alive.discard(m2)
                    changed = True
    return entries


def _resolve(entries: dict[int, ClusterEntry], n: int) -> tuple[list[list[int]], list[int], np.ndarray]:
    """Turn possibly overlapping member sets into a partition.

    A vertex claimed by several entries goes to the one where it scored
    highest relative to the attractor; ties go to the smallest attractor.
    """
    owner = np.full(n, -1, dtype=np.int64)
    best = np.full(n, -np.inf)
    for m in sorted(entries):
        e = entries[m]
        for v in e.members:
            s = e.score.get(v, 0.0)
            if s > best[v]:
                best[v] = s
                owner[v] = m
    groups: dict[int, list[int]] = {}
    for v in np.flatnonzero(owner >= 0).tolist():
        groups.setdefault(int(owner[v]), []).append(v)
    keys = sorted(groups, key=lambda m: groups[m][0])
    clusters = [groups[m] for m in keys]
    assignment = np.full(n, -1, dtype=np.int64)
    for k, c in enumerate(clusters):
        assignment[c] = k
    return clusters, keys, assignment


def default_batch_size(remaining: int) -> int:
    return max(1024, math.ceil(remaining / 100))


def cluster_global(g: Graph, params: LrwParams = LrwParams(), workers: int = 1,
                   rng_seed: int = 0, merge: bool = True, keep_walks: bool = False,
                   backend: str = "thread") -> Clustering:
    """Multi-stage global clustering.

    Each round samples seeds from the not-yet-clustered vertices, explores
    them, adds them to the attractor dictionary, optionally merges
    overlapping entries, folds significant vertices into the member sets
    and removes everything clustered.  Isolated vertices end up as
    singletons because their walks never leave them.
    """
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed, spawn_key=(1,)))
    entries: dict[int, ClusterEntry] = {}
    unclustered = np.ones(g.n, dtype=bool)
    walks: dict[int, WalkOutcome] = {}
    t_explore = t_merge = 0.0
    rounds = 0
    while unclustered.any():
        rounds += 1
        pool = np.flatnonzero(unclustered)
        size = params.batch_size or default_batch_size(len(pool))
        if len(pool) <= size:
            batch = pool
        else:
            batch = np.sort(rng.choice(pool, size=size, replace=False))
        t0 = time.perf_counter()
        outcomes = explore_many(g, batch, params, workers, backend)
        t1 = time.perf_counter()
        for w in outcomes:
            merge_into_dictionary(entries, w.seed, w.feature, params.tau)
            if keep_walks:
                walks[w.seed] = w
        if merge:
            merge_overlapping_clusters(entries)
        for e in entries.values():
            e.members |= e.significant
        before = int(unclustered.sum())
        for e in entries.values():
            unclustered[list(e.members)] = False
        t_merge += time.perf_counter() - t1
        t_explore += t1 - t0
        # every explored seed lands in its own attractor's member set
        assert unclustered.sum() < before, "a round clustered no new vertices"
        log.debug("round %d: %d seeds, %d entries, %d unclustered",
                  rounds, len(batch), len(entries), int(unclustered.sum()))
    t2 = time.perf_counter()
    clusters, keys, assignment = _resolve(entries, g.n)
    t_merge += time.perf_counter() - t2
    unconverged = sum(1 for w in walks.values() if not w.converged)
    if unconverged:
        log.info("%d walk(s) hit t_max without converging", unconverged)
    return Clustering(clusters, assignment, keys, walks,
                      {"exploration": t_explore, "merging": t_merge}, rounds)


@dataclass
class LocalResult:
    """A local cluster plus the intermediate sets of the computation."""

    cluster: list[int]
    core: list[int]       # vertices at or above eta times the attractor value
    fringe: list[int]     # the rest of the seed walk's support, re-explored
    merged: list[int]     # fringe vertices whose cluster merged with the seed's
    walks: dict[int, WalkOutcome] = field(default_factory=dict)


def cluster_local(g: Graph, seed: int, params: LrwParams = LrwParams(), workers: int = 1,
                  backend: str = "thread", merge: bool = True,
                  walk_cache: dict[int, WalkOutcome] | None = None) -> LocalResult:
    """Local cluster around ``seed``.

    The seed's walk splits its support at ``eta`` times the attractor value.
    The high part is kept outright; every low vertex is explored, and those
    whose attractor cluster merges with the seed's are added.

    ``walk_cache`` may carry walks from earlier calls on the same graph and
    parameters; new walks are added to it.
    """
    if not 0 <= seed < g.n:
        raise IndexError(f"seed {seed} out of range [0, {g.n})")
    cache = {} if walk_cache is None else walk_cache
    if seed not in cache:
        cache[seed] = explore(g, seed, params)
    first = cache[seed]
    x = first.feature
    top = x.val.max()
    high = x.val >= params.eta * top
    core = x.idx[high].tolist()
    fringe = x.idx[~high].tolist()
    todo = [v for v in fringe if v not in cache and v != seed]
    for w in explore_many(g, todo, params, workers, backend):
        cache[w.seed] = w
    outcomes = [cache[v] for v in fringe if v != seed]
    entries: dict[int, ClusterEntry] = {}
    merge_into_dictionary(entries, seed, x, params.tau)
    for w in outcomes:
        merge_into_dictionary(entries, w.seed, w.feature, params.tau)
    if merge:
        merge_overlapping_clusters(entries)
    # members are seeds only; exactly one entry holds the seed
    own = next(e.members for e in entries.values() if seed in e.members)
    merged = sorted(v for v in own if v != seed)
    cluster = sorted(set(core) | own)
    walks = {seed: first}
    walks.update((w.seed, w) for w in outcomes)
    return LocalResult(cluster, core, fringe, merged, walks)
