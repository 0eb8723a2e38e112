import subprocess
import sys

import numpy as np
import pytest

from edvwcut import format_hypergraph, parse_network
from edvwcut.cli import main
from edvwcut.textpipe import synthetic_corpus, write_corpus_tsv

from conftest import random_hypergraph, single_edge


@pytest.fixture
def edge_file(tmp_path):
    path = tmp_path / "e.hg"
    path.write_text(format_hypergraph(single_edge([1, 2, 3])))
    return str(path)


@pytest.fixture
def random_file(tmp_path):
    H = random_hypergraph(np.random.default_rng(5), n_max=10, m_max=5, size_max=6)
    path = tmp_path / "r.hg"
    path.write_text(format_hypergraph(H))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def kv(out):
    return dict(line.split("=", 1) for line in out.splitlines() if "=" in line)


# -- reduce --------------------------------------------------------------------------------

def test_reduce_minhalf(capsys, edge_file, tmp_path):
    target = tmp_path / "g.fg"
    code, out, _ = run(capsys, "reduce", "--input", edge_file, "--split", "minhalf",
                       "--output", str(target))
    assert code == 0
    info = kv(out)
    assert info["nodes"] == "5" and info["arcs"] == "7"
    G = parse_network(target.read_text())
    assert G.n_nodes == 5 and G.n_arcs == 7
    assert "edge e1 gadget=symmetric terms=1" in out


def test_reduce_stdout_and_stats_on_stderr(capsys, edge_file):
    code, out, err = run(capsys, "reduce", "--input", edge_file, "--split", "product")
    assert code == 0
    assert out.startswith("n 0 orig:v1")
    assert "nodes=" in err


def test_reduce_sparse_not_more_arcs(capsys, tmp_path):
    path = tmp_path / "big.hg"
    path.write_text(format_hypergraph(single_edge(list(np.linspace(0.5, 3.0, 12)))))
    _, exact, _ = run(capsys, "reduce", "--input", str(path), "--split", "product", "--output",
                      str(tmp_path / "a.fg"))
    _, sparse, _ = run(capsys, "reduce", "--input", str(path), "--split", "product", "--mode",
                       "sparse", "--epsilon", "0.1", "--output", str(tmp_path / "b.fg"))
    assert int(kv(sparse)["arcs"]) <= int(kv(exact)["arcs"])


def test_reduce_bad_spec_and_missing_file(capsys, edge_file):
    assert run(capsys, "reduce", "--input", edge_file, "--split", "bogus")[0] == 2
    assert run(capsys, "reduce", "--input", "/nonexistent.hg", "--split", "product")[0] == 2


def test_reduce_error_names_edge(capsys, edge_file):
    code, _, err = run(capsys, "reduce", "--input", edge_file, "--split", "custom:min(x,G-x)**2")
    assert code == 3
    assert "e1" in err


# -- sparsify ------------------------------------------------------------------------------

def test_sparsify_function_mode(capsys):
    code, out, _ = run(capsys, "sparsify", "--split", "custom:-0.125*x**2+2*x*(1)",
                       "--total", "16", "--gammas", "8,8")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()]
    assert rows[0] == ["piece", "slope", "intercept", "breakpoint"]
    assert len(rows) >= 3


def test_sparsify_builtin_continuous(capsys):
    code, out, _ = run(capsys, "sparsify", "--split", "product", "--gammas", "1,2,3,4",
                       "--method", "continuous", "--epsilon", "0.1")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert rows[0][0] == "1" and float(rows[0][2]) == 0.0
    assert float(rows[-1][1]) == 0.0
    assert float(rows[-1][3]) == 5.0


def test_sparsify_needs_input(capsys):
    assert run(capsys, "sparsify", "--split", "product")[0] == 2


# -- mincut ------------------------------------------------------------------------------

def test_mincut(capsys, tmp_path):
    path = tmp_path / "d.fg"
    path.write_text("n 0 source\nn 1 aux:g:0\nn 2 aux:g:1\nn 3 sink\n"
                    "a 0 1 3\na 0 2 2\na 1 3 2\na 2 3 3\n")
    code, out, _ = run(capsys, "mincut", "--input", str(path), "--source", "0", "--sink", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "value=4"
    assert lines[1] == "0 S" and lines[-1] == "3 T"


def test_mincut_parse_error(capsys, tmp_path):
    path = tmp_path / "bad.fg"
    path.write_text("n 0 source\na 0 5 1\n")
    assert run(capsys, "mincut", "--input", str(path), "--source", "0", "--sink", "1")[0] == 2


# -- hypercut ---------------------------------------------------------------------------

def test_hypercut(capsys, edge_file):
    code, out, _ = run(capsys, "hypercut", "--input", edge_file, "--split", "minhalf",
                       "--sources", "v1", "--sinks", "v3")
    assert code == 0
    info = kv(out)
    assert info["value"] == "1" and info["hypergraph_value"] == "1"
    assert info["source_side"] in ("v1", "v1,v2")


def test_hypercut_same_seed_errors(capsys, edge_file):
    code, _, err = run(capsys, "hypercut", "--input", edge_file, "--split", "minhalf",
                       "--sources", "v1", "--sinks", "v1")
    assert code == 2 and "error" in err
    assert run(capsys, "hypercut", "--input", edge_file, "--split", "minhalf",
               "--sources", "v1", "--sinks", "v7")[0] == 2


def test_hypercut_sparse_within_factor(capsys, random_file):
    args = ["hypercut", "--input", random_file, "--split", "product", "--sources", "v0",
            "--sinks", "v1,v2"]
    _, exact, _ = run(capsys, *args)
    _, sparse, _ = run(capsys, *args, "--mode", "sparse", "--epsilon", "0.1")
    a, b = float(kv(exact)["value"]), float(kv(sparse)["value"])
    assert a * (1 - 1e-9) <= b <= 1.1 * a * (1 + 1e-9)


# -- verify --------------------------------------------------------------------------------

@pytest.mark.parametrize("spec", ["product", "minhalf", "thresh:0.3", "wmin:2,1", "aon",
                                  "custom:sqrt(x*(G-x))"])
def test_verify_passes(capsys, random_file, spec):
    code, out, err = run(capsys, "verify", "--input", random_file, "--split", spec)
    assert code == 0, err
    info = kv(out)
    assert info["failures"] == "0" and int(info["submodular"]) > 0


def test_verify_counterexample(capsys, edge_file):
    code, out, err = run(capsys, "verify", "--input", edge_file, "--split", "custom:min(x,G-x)**2")
    assert code == 1
    assert int(kv(out)["failures"]) >= 1
    assert "edge=e1" in err and "S=" in err


def test_verify_size_limit(capsys, random_file):
    assert run(capsys, "verify", "--input", random_file, "--split", "product",
               "--max-edge-size", "1")[0] == 2


# -- classify ---------------------------------------------------------------------------------

def test_classify(capsys, tmp_path):
    corpus = tmp_path / "c.tsv"
    write_corpus_tsv(corpus, synthetic_corpus(n_docs=60, seed=2))
    args = ["classify", "--corpus", str(corpus), "--grid", "0,1", "--folds", "3",
            "--min-df", "0.01", "--max-df", "0.15", "--seed", "4"]
    code, out, err = run(capsys, *args)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "param,fold,accuracy"
    assert len(lines) == 1 + 2 * 3 + 1 and ",mean," in lines[-1]
    assert "test_accuracy=" in err
    assert run(capsys, *args) == (code, out, err)


def test_classify_bad_corpus(capsys, tmp_path):
    corpus = tmp_path / "c.tsv"
    corpus.write_text("d1\tspam\ttext\n")
    assert run(capsys, "classify", "--corpus", str(corpus))[0] == 2


# -- process level ------------------------------------------------------------------------------

def test_module_entry_point_byte_identical(edge_file):
    cmd = [sys.executable, "-m", "edvwcut", "hypercut", "--input", edge_file, "--split", "product",
           "--sources", "v1", "--sinks", "v3"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout.startswith(b"value=")


def test_usage_error_exit_code(edge_file):
    res = subprocess.run([sys.executable, "-m", "edvwcut", "reduce"], capture_output=True)
    assert res.returncode == 2
