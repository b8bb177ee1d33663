"""OPTIONAL large-data check on the SNAP ego-Facebook graph.

Not part of the default test run: it needs two files from SNAP that you
download yourself (https://snap.stanford.edu/data/ego-Facebook.html):

    facebook_combined.txt.gz   the 4039-vertex, 88234-edge union graph
    facebook.tar.gz            per-volunteer files; unpack it for *.circles

    python scripts/ego_facebook.py --graph facebook_combined.txt.gz --circles facebook/

Ground truth has one community per volunteer: the volunteer plus everyone
in any of their circles.  A vertex in several volunteers' circles belongs
to all of those communities.  Expected at default parameters: 8 to 12
clusters, NMI >= 0.85, mean conductance <= 0.15; a few minutes on a laptop.
"""

from __future__ import annotations

import argparse
import gzip
import io
import sys
import time
from pathlib import Path

from lrw.clustering import cluster_global, default_workers
from lrw.engine import LrwParams
from lrw.graph import load_edge_list
from lrw.metrics import GroundTruth, mean_conductance, nmi

EXPECTED_CLUSTERS = (8, 12)
EXPECTED_NMI = 0.85
EXPECTED_MC = 0.15


def open_text(path: Path):
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path), encoding="utf-8")
    return open(path, encoding="utf-8")


def ego_ground_truth(circles_dir: Path, graph) -> GroundTruth:
    """One community per ``<ego>.circles`` file, mapped to compact ids."""
    files = sorted(circles_dir.glob("*.circles"), key=lambda p: int(p.stem))
    if not files:
        raise FileNotFoundError(f"no *.circles files under {circles_dir}")
    communities = []
    for path in files:
        members = {int(path.stem)}
        for line in path.read_text().splitlines():
            # "circleName<TAB>id id ..."
            members.update(int(t) for t in line.split()[1:])
        compact = []
        for v in members:
            try:
                compact.append(graph.compact_id(v))
            except KeyError:
                pass
        if compact:
            communities.append(sorted(compact))
    return GroundTruth(communities)


def run(graph_path: Path, circles_dir: Path, params=LrwParams(), workers=1, seed=0) -> dict:
    with open_text(graph_path) as fh:
        g = load_edge_list(fh)
    truth = ego_ground_truth(circles_dir, g)
    t0 = time.perf_counter()
    res = cluster_global(g, params, workers=workers, rng_seed=seed)
    report = {
        "vertices": g.n,
        "edges": g.m,
        "truth_communities": len(truth.communities),
        "clusters": res.n_clusters,
        "nmi": nmi(res, truth),
        "mean_conductance": mean_conductance(g, res),
        "seconds": time.perf_counter() - t0,
    }
    lo, hi = EXPECTED_CLUSTERS
    report["ok"] = bool(lo <= report["clusters"] <= hi and report["nmi"] >= EXPECTED_NMI
                        and report["mean_conductance"] <= EXPECTED_MC)
    return report


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--graph", type=Path, required=True, help="facebook_combined.txt[.gz]")
    ap.add_argument("--circles", type=Path, required=True, help="directory holding <ego>.circles files")
    ap.add_argument("--threads", type=int, default=default_workers())
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    report = run(args.graph, args.circles, workers=args.threads, seed=args.seed)
    for k, v in report.items():
        print(f"{k}={v:.4f}" if isinstance(v, float) else f"{k}={v}")
    return 0 if report["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
