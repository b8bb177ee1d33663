import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrw.clustering import (ClusterEntry, Clustering, attractor_and_significant, cluster_global,
                            cluster_local, default_batch_size, explore_many,
                            merge_into_dictionary, merge_overlapping_clusters)
from lrw.engine import LrwParams, SparseProbVector, explore
from lrw.graph import Graph

from conftest import barbell, clique_edges, dense_lrw, graph_from_adjacency, random_adjacency

SPV = SparseProbVector.from_dict


def entries_from(sets):
    return {k: ClusterEntry(k, {k}, set(s)) for k, s in enumerate(sets)}


def closure_oracle(sets):
    """Merge any two groups whose unions satisfy the overlap predicate, until none do."""
    groups = [({k}, set(s)) for k, s in enumerate(sets)]
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                a, b = groups[i][1], groups[j][1]
                if len(a & b) > min(len(a), len(b)) / 2:
                    groups[i] = (groups[i][0] | groups[j][0], a | b)
                    del groups[j]
                    merged = True
                    break
            if merged:
                break
    return sorted(sorted(g[0]) for g in groups)


def partition_of(entries):
    return sorted(sorted(e.members) for e in entries.values())


# -- attractor / significant

def test_attractor_point_mass():
    assert attractor_and_significant(SPV({7: 1.0}), 0.3) == (7, {7})


def test_attractor_threshold():
    assert attractor_and_significant(SPV({1: 0.5, 2: 0.4, 3: 0.05}), 0.3) == (1, {1, 2})


def test_attractor_tie_goes_to_smallest_id():
    assert attractor_and_significant(SPV({4: 0.5, 9: 0.5}), 0.3) == (4, {4, 9})


def test_attractor_empty_rejected():
    with pytest.raises(ValueError):
        attractor_and_significant(SparseProbVector(np.empty(0, np.int64), np.empty(0)), 0.3)


# -- dictionary

def test_first_insert_creates_entry():
    d = merge_into_dictionary({}, 5, SPV({2: 0.7, 5: 0.3}), 0.3)
    assert list(d) == [2]
    assert d[2].members == {5} and d[2].significant == {2, 5}


def test_shared_attractor_collects_seeds():
    d = {}
    merge_into_dictionary(d, 1, SPV({0: 0.6, 1: 0.4}), 0.3)
    merge_into_dictionary(d, 3, SPV({0: 0.5, 3: 0.5}), 0.3)
    assert list(d) == [0]
    assert d[0].members == {1, 3}
    assert d[0].significant == {0, 1, 3}


def test_distinct_attractors_make_two_entries():
    d = {}
    merge_into_dictionary(d, 1, SPV({0: 1.0}), 0.3)
    merge_into_dictionary(d, 2, SPV({9: 1.0}), 0.3)
    assert sorted(d) == [0, 9]


# -- overlap merging

def test_overlap_merges():
    d = merge_overlapping_clusters(entries_from([{1, 2, 3}, {2, 3, 4}]))
    assert partition_of(d) == [[0, 1]]
    assert d[0].significant == {1, 2, 3, 4}


def test_disjoint_sets_stay_apart():
    assert partition_of(merge_overlapping_clusters(entries_from([{1, 2}, {3, 4}]))) == [[0], [1]]


def test_half_overlap_is_not_enough():
    # |{4,5,6}| = 3 is not strictly above half of 6
    sets = [set(range(1, 7)), set(range(4, 10)), set(range(7, 13))]
    assert partition_of(merge_overlapping_clusters(entries_from(sets))) == closure_oracle(sets)
    assert closure_oracle(sets) == [[0], [1], [2]]


def test_transitive_chain_merges():
    # the first and last sets share only {5, 6}; they join through the middle one
    sets = [set(range(1, 7)), set(range(3, 9)), set(range(5, 11))]
    assert closure_oracle(sets) == [[0, 1, 2]]
    assert partition_of(merge_overlapping_clusters(entries_from(sets))) == [[0, 1, 2]]


def test_merge_result_independent_of_insertion_order():
    sets = [set(range(1, 7)), set(range(3, 9)), set(range(5, 11)), {20, 21}, {21, 22, 23}]
    a = entries_from(sets)
    b = {k: a[k] for k in reversed(list(a))}
    b = {k: ClusterEntry(e.attractor, set(e.members), set(e.significant)) for k, e in b.items()}
    assert partition_of(merge_overlapping_clusters(a)) == partition_of(merge_overlapping_clusters(b))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sets(st.integers(0, 15), min_size=1, max_size=8), min_size=1, max_size=8))
def test_merge_reaches_a_fixpoint(sets):
    d = merge_overlapping_clusters(entries_from(sets))
    members = [m for e in d.values() for m in e.members]
    assert sorted(members) == list(range(len(sets)))
    es = list(d.values())
    for i in range(len(es)):
        for j in range(i + 1, len(es)):
            a, b = es[i].significant, es[j].significant
            assert not len(a & b) > min(len(a), len(b)) / 2


# -- global clustering

def test_two_triangles():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    c = cluster_global(g)
    assert c.clusters == [[0, 1, 2], [3, 4, 5]]
    assert c.assignment.tolist() == [0, 0, 0, 1, 1, 1]


def test_isolated_vertices_become_singletons():
    g = Graph.from_edges(6, clique_edges(range(4)))
    c = cluster_global(g)
    assert c.clusters == [[0, 1, 2, 3], [4], [5]]


def test_batch_size_rule():
    assert default_batch_size(10) == 1024
    assert default_batch_size(102400) == 1024
    assert default_batch_size(102401) == 1025


def test_small_batches_need_several_rounds():
    g = barbell(6)
    c = cluster_global(g, LrwParams(batch_size=1), rng_seed=3)
    assert c.rounds >= 2
    assert sorted(v for cl in c.clusters for v in cl) == list(range(12))


def test_skip_merge_keeps_more_or_equal_clusters(rng):
    adj = random_adjacency(rng, 60, 0.08)
    g = graph_from_adjacency(adj)
    merged = cluster_global(g, merge=True)
    unmerged = cluster_global(g, merge=False)
    assert unmerged.n_clusters >= merged.n_clusters


def test_timings_and_walks_recorded():
    g = barbell(5)
    c = cluster_global(g, keep_walks=True)
    assert set(c.timings) == {"exploration", "merging"}
    assert set(c.walks) == set(range(10))


def test_from_assignment_relabels_by_smallest_member():
    c = Clustering.from_assignment([5, 5, 2, -1, 2])
    assert c.clusters == [[0, 1], [2, 4]]
    assert c.assignment.tolist() == [0, 0, 1, -1, 1]


graphs = st.builds(lambda n, p, s: graph_from_adjacency(random_adjacency(np.random.default_rng(s), n, p)),
                   st.integers(1, 45), st.floats(0.0, 0.4), st.integers(0, 2 ** 31))


@settings(max_examples=40, deadline=None)
@given(graphs, st.integers(0, 1000), st.sampled_from([None, 3]))
def test_global_output_is_a_partition(g, seed, batch):
    c = cluster_global(g, LrwParams(batch_size=batch), rng_seed=seed)
    flat = sorted(v for cl in c.clusters for v in cl)
    assert flat == list(range(g.n))
    for k, cl in enumerate(c.clusters):
        assert all(c.assignment[v] == k for v in cl)


@settings(max_examples=30, deadline=None)
@given(graphs)
def test_attractor_lies_in_seed_component(g):
    label = np.full(g.n, -1)
    for s in range(g.n):
        if label[s] >= 0:
            continue
        stack = [s]
        label[s] = s
        while stack:
            v = stack.pop()
            for u in g.neighbors_of(v):
                if label[u] < 0:
                    label[u] = s
                    stack.append(int(u))
    for s in range(g.n):
        assert label[explore(g, s).feature.argmax()] == label[s]


def test_worker_count_and_backend_do_not_change_results(rng):
    g = graph_from_adjacency(random_adjacency(rng, 80, 0.07))
    params = LrwParams(batch_size=16)
    ref = cluster_global(g, params, workers=1, rng_seed=9)
    for workers, backend in [(2, "thread"), (4, "thread"), (2, "process")]:
        got = cluster_global(g, params, workers=workers, rng_seed=9, backend=backend)
        assert got.clusters == ref.clusters
        assert got.attractors == ref.attractors


def test_explore_many_preserves_order():
    g = barbell(4)
    seeds = [7, 0, 3, 5]
    out = explore_many(g, seeds, LrwParams(), workers=3)
    assert [w.seed for w in out] == seeds
    with pytest.raises(ValueError):
        explore_many(g, seeds, LrwParams(), workers=2, backend="carrier-pigeon")


# -- local clustering

def test_local_disjoint_k4():
    g = Graph.from_edges(9, clique_edges(range(4)) + clique_edges(range(4, 9)))
    for seed in range(4):
        assert cluster_local(g, seed).cluster == [0, 1, 2, 3]


def test_local_barbell_left_clique():
    g = barbell(5)
    ref = dense_lrw(g.to_dense(), 1, 2.0, 100)[-1]
    oracle_core = set(np.flatnonzero(ref >= 0.3 * ref.max()).tolist())
    res = cluster_local(g, 1)
    assert oracle_core <= set(res.cluster)
    # the bridge endpoint 5 may or may not be included; nothing further right
    assert set(range(5)) <= set(res.cluster) <= set(range(6))


@settings(max_examples=30, deadline=None)
@given(graphs, st.integers(0, 10 ** 6))
def test_local_cluster_contains_seed(g, s):
    seed = s % g.n
    res = cluster_local(g, seed)
    assert seed in res.cluster
    assert set(res.core) | set(res.fringe) == set(res.walks[seed].feature.idx.tolist())


def test_local_workers_and_cache_do_not_change_results(rng):
    g = graph_from_adjacency(random_adjacency(rng, 70, 0.08))
    cache = {}
    for seed in (0, 11, 42):
        a = cluster_local(g, seed, workers=1)
        b = cluster_local(g, seed, workers=3, walk_cache=cache)
        assert a.cluster == b.cluster and a.merged == b.merged


def test_local_rejects_bad_seed():
    with pytest.raises(IndexError):
        cluster_local(barbell(3), -1)
