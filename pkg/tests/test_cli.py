import csv
import itertools
import json

import numpy as np
import pytest

from lpreduce.cli import main
from lpreduce.io import RunReport, read_csv_matrix, write_csv_matrix


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def test_gen_simplex(tmp_path):
    out = tmp_path / "pts.csv"
    assert run(["gen", "--kind", "simplex", "--k", "12", "--m", "300", "--scale", "5",
                "--seed", "7", "--output", str(out)]) == 0
    X = read_csv_matrix(out)
    assert X.shape == (12, 300)
    for u, v in itertools.combinations(range(12), 2):
        assert np.sum(np.abs(X[u] - X[v])) == 10.0


@pytest.mark.parametrize("kind", ["gaussian", "simplex", "clustered"])
def test_gen_is_deterministic(tmp_path, kind):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(["gen", "--kind", kind, "--k", "5", "--m", "9", "--seed", "3",
                    "--output", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_unknown_kind():
    assert run(["gen", "--kind", "unknown", "--k", "3", "--m", "3"]) == 2


@pytest.mark.parametrize("kind", ["gaussian", "simplex", "clustered"])
def test_gen_reduce_round_trip(tmp_path, kind):
    pts, red, rep = tmp_path / "pts.csv", tmp_path / "red.json", tmp_path / "rep.json"
    assert run(["gen", "--kind", kind, "--k", "6", "--m", "25", "--seed", "1",
                "--output", str(pts)]) == 0
    assert run(["reduce", "--input", str(pts), "--p", "1.0", "--eps-snow", "0.1",
                "--d-bss", "9", "--output", str(red), "--report", str(rep)]) == 0
    report = RunReport.from_json(rep.read_text())
    assert report.to_json() == rep.read_text()
    d = report.distortion
    F = report.certified_factor
    assert d["max_ratio"] / d["min_ratio"] <= F**2
    reduced = json.loads(red.read_text())
    assert reduced["n"] == report.n == len(reduced["points"][0])


def test_reduce_csv_output_with_header(tmp_path):
    pts, out = tmp_path / "pts.csv", tmp_path / "red.csv"
    X = np.random.default_rng(0).standard_normal((4, 6))
    write_csv_matrix(pts, X, header=[f"x{i}" for i in range(6)])
    assert run(["reduce", "--input", str(pts), "--p", "0.5", "--output", str(out)]) == 0
    assert read_csv_matrix(out).shape[0] == 4


def test_reduce_rejects_p(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    write_csv_matrix(pts, np.eye(3))
    assert run(["reduce", "--input", str(pts), "--p", "2.5"]) == 2
    assert "(0, 2)" in capsys.readouterr().err


def test_reduce_empty_file(tmp_path):
    pts = tmp_path / "empty.csv"
    pts.write_text("")
    assert run(["reduce", "--input", str(pts), "--p", "1"]) == 2


def test_reduce_missing_file(tmp_path):
    assert run(["reduce", "--input", str(tmp_path / "nope.csv"), "--p", "1"]) == 2


def test_reduce_ragged_file(tmp_path):
    pts = tmp_path / "bad.csv"
    pts.write_text("1,2,3\n4,5\n")
    assert run(["reduce", "--input", str(pts), "--p", "1"]) == 2


def test_snowflake_failure_exits_3(monkeypatch, capsys):
    from lpreduce import cli, snowflake

    def capped(*args, **kwargs):
        return snowflake.build_snowflake_map(*args, j_cap=4, **kwargs)

    monkeypatch.setattr(cli, "build_snowflake_map", capped)
    assert run(["snowflake-audit", "--rho", "0.5", "--eps", "0.001", "--umin", "0.01",
                "--umax", "100"]) == 3
    assert "snowflake" in capsys.readouterr().err


def test_sparsify_identity(tmp_path):
    vec, out = tmp_path / "v.csv", tmp_path / "w.json"
    write_csv_matrix(vec, np.eye(4))
    assert run(["sparsify", "--input", str(vec), "--d", "4", "--verify",
                "--output", str(out)]) == 0
    res = json.loads(out.read_text())
    assert len(res["support"]) == 4
    assert res["kappa"] <= 9.0
    assert set(res) >= {"d", "rank", "support", "kappa", "scale"}


def test_sparsify_rejects_d(tmp_path):
    vec = tmp_path / "v.csv"
    write_csv_matrix(vec, np.eye(4))
    assert run(["sparsify", "--input", str(vec), "--d", "1"]) == 2


def test_sparsify_verify_random(tmp_path):
    vec = tmp_path / "v.csv"
    write_csv_matrix(vec, np.random.default_rng(2).standard_normal((60, 5)))
    assert run(["sparsify", "--input", str(vec), "--d", "9", "--verify"]) == 0


def test_snowflake_audit(tmp_path):
    out = tmp_path / "a.json"
    assert run(["snowflake-audit", "--rho", "0.5", "--eps", "0.1", "--umin", "0.01",
                "--umax", "100", "--output", str(out)]) == 0
    res = json.loads(out.read_text())
    assert res["audit"]["max_ratio"] <= 1.1
    assert res["passes"]


@pytest.mark.parametrize("argv", [
    ["--rho", "1.5", "--umin", "0.01", "--umax", "100"],
    ["--rho", "0.5", "--umin", "10", "--umax", "1"],
])
def test_snowflake_audit_validation(argv):
    assert run(["snowflake-audit", *argv]) == 2


def test_bench(tmp_path):
    out = tmp_path / "bench.csv"
    assert run(["bench", "--k-values", "8,16,32", "--m", "30", "--p", "1.0",
                "--output", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [int(r["k"]) for r in rows] == [8, 16, 32]
    assert len({int(r["n_bound"]) / int(r["k"]) for r in rows}) == 1
    for r in rows:
        assert float(r["measured_distortion"]) <= float(r["certified_distortion"])


def test_bench_empty_k_range():
    assert run(["bench", "--k-values", "", "--p", "1.0"]) == 2
