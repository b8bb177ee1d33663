"""Command-line front end.

    lrw generate planted --n 128 --d 16 --c 4 --q 4 --seed 1 --out g
    lrw cluster g.edges --out g.clusters.tsv
    lrw local g.edges 17
    lrw eval --metric nmi --pred g.clusters.tsv --truth g.labels.tsv
    lrw bench table1 --out table1.csv
"""

from __future__ import annotations

import argparse
import collections
import csv
import io
import json
import logging
import sys
import time

import numpy as np

from . import __version__
from .clustering import Clustering, cluster_global, cluster_local, default_workers
from .engine import LrwParams
from .errors import LrwError
from .generators import (PlantedPartitionSpec, PowerLawSpec, derive_seed, generate_planted,
                         generate_powerlaw, mean_degree, write_labeled_graph)
from .graph import Graph, read_edge_list, write_remap
from .metrics import (GroundTruth, jaccard, load_communities, load_labels, mean_conductance, nmi,
                      rand_index_sampled)

log = logging.getLogger("lrw")

TABLE1_Q = (4.0, 3.0, 2.33, 1.86, 1.5, 1.22, 1.0)


class CliError(Exception):
    pass


def _add_lrw_flags(p):
    d = LrwParams()
    p.add_argument("--r", type=float, default=d.r, help="inflation exponent (> 1)")
    p.add_argument("--tmax", type=int, default=d.t_max, help="maximum walk iterations")
    p.add_argument("--epsilon", type=float, default=d.epsilon, help="prune threshold")
    p.add_argument("--xi", type=float, default=d.xi, help="L2 convergence threshold")
    p.add_argument("--tau", type=float, default=d.tau, help="significance threshold for merging")
    p.add_argument("--eta", type=float, default=d.eta, help="local-clustering significance threshold")
    p.add_argument("--batch-size", type=int, default=None, help="seeds per round (default max(1024, |B|/100))")
    p.add_argument("--threads", type=int, default=default_workers(), help="exploration workers")
    p.add_argument("--skip-merge", action="store_true", help="skip the overlap-merging phase")


def _params(args) -> LrwParams:
    return LrwParams(r=args.r, t_max=args.tmax, epsilon=args.epsilon, xi=args.xi,
                     tau=args.tau, eta=args.eta, batch_size=args.batch_size)


def _read_graph(path) -> Graph:
    try:
        return read_edge_list(path)
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror or e}") from None


def _emit(report: dict, fmt: str = "kv"):
    if fmt == "json":
        print(json.dumps(report, sort_keys=False))
        return
    for k, v in report.items():
        if isinstance(v, float):
            v = f"{v:.6g}"
        print(f"{k}={v}")


# --
# generate

def cmd_generate(args):
    if args.model == "planted":
        spec = PlantedPartitionSpec(n=args.n, d=args.d, c=args.c, q=args.q, rng_seed=args.seed)
        lg = generate_planted(spec)
    else:
        spec = PowerLawSpec(n=args.n, degree_min=args.dmin, degree_max=args.dmax,
                            cluster_min=args.cmin, cluster_max=args.cmax,
                            exponent_degree=args.exp_degree, exponent_size=args.exp_size,
                            q=args.q, rng_seed=args.seed)
        lg = generate_powerlaw(spec)
    edges, labels = f"{args.out}.edges", f"{args.out}.labels.tsv"
    write_labeled_graph(lg, edges, labels)
    intra, inter = lg.intra_inter_edges()
    _emit({"edges_file": edges, "labels_file": labels, "n": lg.graph.n, "m": lg.graph.m,
           "mean_degree": mean_degree(lg.graph), "clusters": int(lg.labels.max()) + 1,
           "intra_edges": intra, "inter_edges": inter})


# --
# cluster

def write_assignment(g: Graph, c: Clustering, stream, fmt="tsv"):
    ids = g.ids
    if fmt == "tsv":
        for v in range(g.n):
            stream.write(f"{ids[v]}\t{c.assignment[v]}\n")
        return
    for members, m in zip(c.clusters, c.attractors):
        rest = [v for v in members if v != m]
        order = ([m] if len(rest) < len(members) else []) + rest
        stream.write(" ".join(str(ids[v]) for v in order) + "\n")


def cmd_cluster(args):
    g = _read_graph(args.input)
    params = _params(args)
    t0 = time.perf_counter()
    c = cluster_global(g, params, workers=args.threads, rng_seed=args.seed, merge=not args.skip_merge)
    wall = time.perf_counter() - t0
    out = args.out or f"{args.input}.clusters.tsv"
    with open(out, "w", encoding="utf-8") as fh:
        write_assignment(g, c, fh, args.format)
    if args.remap:
        with open(args.remap, "w", encoding="utf-8") as fh:
            write_remap(g, fh)
    sizes = sorted((len(x) for x in c.clusters), reverse=True)
    _emit({"output": out, "n": g.n, "m": g.m, "clusters": c.n_clusters,
           "largest_clusters": ",".join(map(str, sizes[:10])), "rounds": c.rounds,
           "exploration_seconds": c.timings["exploration"], "merging_seconds": c.timings["merging"],
           "wall_seconds": wall})


# --
# local

def cmd_local(args):
    g = _read_graph(args.input)
    params = _params(args)
    try:
        seed = g.compact_id(args.vertex)
    except KeyError:
        raise CliError(f"vertex {args.vertex} is not in the graph") from None
    res = cluster_local(g, seed, params, workers=args.threads, merge=not args.skip_merge)
    ids = sorted(int(g.ids[v]) for v in res.cluster)
    print(" ".join(map(str, ids)))
    _emit({"size": len(ids), "core_size": len(res.core), "fringe_size": len(res.fringe),
           "fringe_merged": len(res.merged)})


# --
# eval

def _read_partition(path, g: Graph | None):
    """Assignment TSV (``vertex<TAB>cluster``) or one cluster per line."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror or e}") from None
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if lines and all("\t" in ln and len(ln.split()) == 2 for ln in lines):
        return load_labels(io.StringIO(text), g)
    gt = load_communities(io.StringIO(text), g)
    n = g.n if g is not None else 1 + max((max(c) for c in gt.communities), default=-1)
    labels = np.full(n, -1, dtype=np.int64)
    for k, com in enumerate(gt.communities):
        labels[com] = k
    return labels


def _read_truth(path, g: Graph | None) -> GroundTruth:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror or e}") from None
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if lines and all("\t" in ln and len(ln.split()) == 2 for ln in lines):
        return GroundTruth.from_labels(load_labels(io.StringIO(text), g))
    return load_communities(io.StringIO(text), g)


def _read_id_set(path, g: Graph | None) -> set[int]:
    try:
        with open(path, encoding="utf-8") as fh:
            tokens = fh.read().split("\n", 1)[0].split()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror or e}") from None
    ids = {int(t) for t in tokens}
    return {g.compact_id(v) for v in ids} if g is not None else ids


def cmd_eval(args):
    g = _read_graph(args.graph) if args.graph else None
    report = {}
    for metric in args.metric:
        if metric in ("nmi", "rand", "jaccard") and not args.truth:
            raise CliError(f"metric {metric} needs --truth")
        if metric == "mc" and g is None:
            raise CliError("metric mc needs --graph")
        if metric == "jaccard":
            found = _read_id_set(args.pred, g)
            truth = _read_truth(args.truth, g)
            if args.vertex is not None:
                v = g.compact_id(args.vertex) if g is not None else args.vertex
                target = next((c for c in truth.communities if v in c), None)
                if target is None:
                    raise CliError(f"vertex {args.vertex} is in no ground-truth community")
            else:
                target = truth.communities[0]
            report["jaccard"] = jaccard(found, target)
            continue
        pred = _read_partition(args.pred, g)
        if metric == "nmi":
            report["nmi"] = nmi(pred, _read_truth(args.truth, g))
        elif metric == "mc":
            report["mean_conductance"] = mean_conductance(g, pred)
        elif metric == "rand":
            pairs = None if args.pairs == 0 else args.pairs
            report["rand_index"] = rand_index_sampled(pred, _read_truth(args.truth, g), pairs, args.seed)
    _emit(report, args.format)


# --
# bench

def bench_table1(qs, graphs, seed, params, workers, n=128, d=16.0, c=4, records=None):
    """Planted-partition sweep: per q, mean NMI and cluster counts over ``graphs`` graphs.

    ``records``, if given, receives ``(q, graph, clustering)`` per run with
    every walk kept.
    """
    rows = []
    for q in qs:
        scores, counts = [], []
        for i in range(graphs):
            spec = PlantedPartitionSpec(n=n, d=d, c=c, q=q, rng_seed=derive_seed(seed, 1, i))
            lg = generate_planted(spec)
            res = cluster_global(lg.graph, params, workers=workers, rng_seed=derive_seed(seed, 2, i),
                                 keep_walks=records is not None)
            if records is not None:
                records.append((q, lg.graph, res))
            scores.append(nmi(res, lg.labels))
            counts.append(res.n_clusters)
        modal = collections.Counter(counts).most_common(1)[0][0]
        rows.append({"q": q, "nmi": float(np.mean(scores)), "clusters_mean": float(np.mean(counts)),
                     "clusters_modal": modal, "single_cluster_runs": counts.count(1)})
    return rows


def bench_table2(qs, graphs, seeds_per_graph, seed, params, workers, spec_kwargs=None, records=None):
    """Power-law local-clustering sweep: per q, mean Jaccard over graphs x seeds.

    ``records``, if given, receives ``(q, graph, seed, local_result)`` per run.
    """
    rows = []
    for q in qs:
        scores = []
        for i in range(graphs):
            spec = PowerLawSpec(q=q, rng_seed=derive_seed(seed, 3, i), **(spec_kwargs or {}))
            lg = generate_powerlaw(spec)
            rng = np.random.default_rng(derive_seed(seed, 4, i))
            picks = rng.choice(lg.graph.n, size=seeds_per_graph, replace=False)
            cache = {}
            for v in picks.tolist():
                res = cluster_local(lg.graph, v, params, workers=workers, walk_cache=cache)
                if records is not None:
                    records.append((q, lg.graph, v, res))
                scores.append(jaccard(res.cluster, np.flatnonzero(lg.labels == lg.labels[v]).tolist()))
        rows.append({"q": q, "jaccard": float(np.mean(scores)), "samples": len(scores)})
    return rows


def cmd_bench(args):
    params = _params(args)
    qs = args.q or list(TABLE1_Q)
    if args.table == "table1":
        rows = bench_table1(qs, args.graphs, args.seed, params, args.threads)
    else:
        rows = bench_table2(qs, args.graphs, args.seeds_per_graph, args.seed, params, args.threads)
    stream = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.DictWriter(stream, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: (f"{v:.4f}" if isinstance(v, float) else v) for k, v in row.items()})
    finally:
        if args.out:
            stream.close()


# --

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lrw", description="Limited random walk graph clustering.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic benchmark graph and its labels")
    gen = p.add_subparsers(dest="model", required=True)
    pp = gen.add_parser("planted", help="equal-size planted partition")
    pp.add_argument("--n", type=int, default=128)
    pp.add_argument("--d", type=float, default=16.0, help="expected degree")
    pp.add_argument("--c", type=int, default=4, help="number of clusters")
    pp.add_argument("--q", type=float, default=4.0, help="intra/inter degree ratio")
    pw = gen.add_parser("powerlaw", help="power-law degrees and cluster sizes")
    pw.add_argument("--n", type=int, default=2048)
    pw.add_argument("--dmin", type=int, default=16)
    pw.add_argument("--dmax", type=int, default=128)
    pw.add_argument("--cmin", type=int, default=16)
    pw.add_argument("--cmax", type=int, default=256)
    pw.add_argument("--exp-degree", type=float, default=2.0)
    pw.add_argument("--exp-size", type=float, default=1.0)
    pw.add_argument("--q", type=float, default=4.0)
    for sp in (pp, pw):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="graph", help="output prefix")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("cluster", help="global clustering of an edge list")
    p.add_argument("input")
    p.add_argument("--out")
    p.add_argument("--format", choices=["tsv", "clusters"], default="tsv")
    p.add_argument("--seed", type=int, default=0, help="seed for batch sampling")
    p.add_argument("--remap", help="also write the original-to-compact id table here")
    _add_lrw_flags(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("local", help="local cluster around one vertex")
    p.add_argument("input")
    p.add_argument("vertex", type=int, help="seed vertex (original id)")
    _add_lrw_flags(p)
    p.set_defaults(func=cmd_local)

    p = sub.add_parser("eval", help="score a clustering")
    p.add_argument("--metric", action="append", choices=["nmi", "mc", "jaccard", "rand"], required=True)
    p.add_argument("--pred", required=True, help="assignment TSV, cluster-per-line file or (jaccard) id list")
    p.add_argument("--truth", help="labels TSV or community-per-line file")
    p.add_argument("--graph", help="edge list; needed for mc, maps original ids otherwise")
    p.add_argument("--vertex", type=int, help="jaccard: compare with the truth community of this vertex")
    p.add_argument("--pairs", type=int, default=1000, help="rand: pairs per class (0 = all pairs)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["kv", "json"], default="kv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="planted (table1) or power-law local (table2) sweeps as CSV")
    p.add_argument("table", choices=["table1", "table2"])
    p.add_argument("--q", type=float, action="append", help="q values (repeatable)")
    p.add_argument("--graphs", type=int, default=10)
    p.add_argument("--seeds-per-graph", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_lrw_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (LrwError, CliError, KeyError, ValueError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"lrw: error: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
