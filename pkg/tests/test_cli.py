import csv
import json

import pytest

from lrw.cli import main
from lrw.datasets import karate_edge_list_text


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


@pytest.fixture
def planted(tmp_path, capsys):
    prefix = tmp_path / "g"
    code, out, _ = run(capsys, "generate", "planted", "--seed", 1, "--out", prefix)
    assert code == 0
    return prefix, kv(out)


def test_generate_planted_writes_files(planted):
    prefix, report = planted
    assert report["n"] == "128"
    assert int(report["clusters"]) == 4
    assert prefix.with_suffix(".edges").exists()
    labels = prefix.with_name("g.labels.tsv").read_text().splitlines()
    assert len(labels) == 128 and labels[0] == "0\t0"


def test_cluster_then_eval(planted, capsys, tmp_path):
    prefix, _ = planted
    out = tmp_path / "c.tsv"
    remap = tmp_path / "remap.tsv"
    code, text, _ = run(capsys, "cluster", f"{prefix}.edges", "--out", out, "--threads", 1, "--remap", remap)
    assert code == 0
    assert kv(text)["clusters"] == "4"
    assert remap.read_text().startswith("original_id\tcompact_id\n")
    code, text, _ = run(capsys, "eval", "--metric", "nmi", "--metric", "rand", "--metric", "mc",
                        "--pred", out, "--truth", f"{prefix}.labels.tsv", "--graph", f"{prefix}.edges")
    assert code == 0
    report = kv(text)
    assert float(report["nmi"]) == 1.0
    assert float(report["rand_index"]) == 1.0
    assert 0 < float(report["mean_conductance"]) < 0.5


def test_cluster_output_independent_of_threads(planted, capsys, tmp_path):
    prefix, _ = planted
    outs = []
    for threads in (1, 2, 4):
        out = tmp_path / f"c{threads}.tsv"
        assert run(capsys, "cluster", f"{prefix}.edges", "--out", out, "--threads", threads,
                   "--batch-size", 20, "--seed", 3)[0] == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_clusters_format_puts_attractor_first(tmp_path, capsys):
    path = tmp_path / "karate.edges"
    path.write_text(karate_edge_list_text())
    out = tmp_path / "k.txt"
    assert run(capsys, "cluster", path, "--out", out, "--format", "clusters")[0] == 0
    lines = [list(map(int, ln.split())) for ln in out.read_text().splitlines()]
    assert sorted(v for ln in lines for v in ln) == list(range(34))


def test_local_prints_cluster(planted, capsys):
    prefix, _ = planted
    code, text, _ = run(capsys, "local", f"{prefix}.edges", 5, "--threads", 1)
    assert code == 0
    ids = list(map(int, text.splitlines()[0].split()))
    assert 5 in ids
    assert int(kv(text)["size"]) == len(ids)


def test_eval_jaccard_and_json(tmp_path, capsys):
    pred = tmp_path / "found.txt"
    pred.write_text("1 2 3\n")
    truth = tmp_path / "truth.txt"
    truth.write_text("2 3 4\n7 8\n")
    code, text, _ = run(capsys, "eval", "--metric", "jaccard", "--pred", pred, "--truth", truth,
                        "--vertex", 2, "--format", "json")
    assert code == 0
    assert json.loads(text) == {"jaccard": 0.5}


def test_bench_table1_csv(tmp_path, capsys):
    out = tmp_path / "t1.csv"
    code, _, _ = run(capsys, "bench", "table1", "--q", 4, "--graphs", 2, "--out", out, "--threads", 1)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["q", "nmi", "clusters_mean", "clusters_modal", "single_cluster_runs"]
    assert float(rows[0]["nmi"]) > 0.9


def test_bench_table2_csv(tmp_path, capsys):
    code, text, _ = run(capsys, "bench", "table2", "--q", 4, "--graphs", 1, "--seeds-per-graph", 2, "--threads", 1)
    assert code == 0
    rows = list(csv.DictReader(text.splitlines()))
    assert rows[0]["samples"] == "2"


@pytest.mark.parametrize("argv, fragment", [
    (["generate", "planted", "--c", "1"], "c must be at least 2"),
    (["cluster", "/nonexistent/file.edges"], "cannot read"),
    (["cluster", "GRAPH", "--r", "1.0"], "r must exceed 1"),
    (["local", "GRAPH", "0", "--eta", "1.0"], "eta"),
    (["local", "GRAPH", "999"], "not in the graph"),
    (["eval", "--metric", "mc", "--pred", "GRAPH"], "needs --graph"),
])
def test_errors_exit_two(argv, fragment, tmp_path, capsys):
    graph = tmp_path / "g.edges"
    graph.write_text("0 1\n1 2\n")
    argv = [str(graph) if a == "GRAPH" else a for a in argv]
    if argv[0] == "generate":
        argv += ["--out", str(tmp_path / "x")]
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert fragment in err


def test_format_error_reports_line(tmp_path, capsys):
    graph = tmp_path / "bad.edges"
    graph.write_text("0 1\n1 2 0.3\n")
    code, _, err = run(capsys, "cluster", graph)
    assert code == 2 and "line 2" in err


def test_generate_same_seed_same_bytes(tmp_path, capsys):
    for name in ("a", "b"):
        run(capsys, "generate", "powerlaw", "--n", 512, "--seed", 4, "--out", tmp_path / name)
    assert (tmp_path / "a.edges").read_bytes() == (tmp_path / "b.edges").read_bytes()
