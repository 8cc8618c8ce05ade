import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "kauri.cli"]


def run(*args, **kw):
    return subprocess.run(CLI + list(args), capture_output=True, text=True, **kw)


@pytest.fixture(scope="module")
def gaussians_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "gaussians.csv"
    out = run("gen", "--dataset", "rotated-gaussians", "--n", "120",
              "--theta", "0.785398", "--seed", "4", "--out", str(path))
    assert out.returncode == 0, out.stderr
    return path


def test_gen_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for p in (a, b):
        out = run("gen", "--dataset", "rotated-gaussians", "--n", "60",
                  "--theta", "0.3", "--seed", "9", "--out", str(p))
        assert out.returncode == 0, out.stderr
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "x0,x1,label"
    assert len(a.read_text().splitlines()) == 61


def test_gen_pathology(tmp_path):
    p = tmp_path / "path.csv"
    out = run("gen", "--dataset", "imm-pathology", "--n-per-side", "10",
              "--out", str(p))
    assert out.returncode == 0, out.stderr
    assert len(p.read_text().splitlines()) == 23  # header + 2*10 + 2


def test_fit_and_predict_roundtrip(tmp_path, gaussians_csv):
    tree = tmp_path / "tree.json"
    labels = tmp_path / "labels.csv"
    dot = tmp_path / "tree.dot"
    out = run("fit", "--data", str(gaussians_csv), "--labels-col", "label",
              "--k-max", "2", "--max-leaves", "2",
              "--out-tree", str(tree), "--out-labels", str(labels),
              "--out-dot", str(dot))
    assert out.returncode == 0, out.stderr
    kv = dict(line.split("=", 1) for line in out.stdout.splitlines() if "=" in line)
    assert kv["clusters"] == "2"
    assert kv["leaves"] == "2"
    assert float(kv["objective"]) > 0
    assert json.loads(tree.read_text())  # valid JSON
    assert dot.read_text().startswith("digraph")

    pred = run("predict", "--tree", str(tree), "--data", str(gaussians_csv),
               "--labels-col", "label")
    assert pred.returncode == 0, pred.stderr
    assert pred.stdout == labels.read_text()


def test_fit_scale_flag_changes_thresholds(tmp_path, gaussians_csv):
    t1 = tmp_path / "t1.json"
    t2 = tmp_path / "t2.json"
    for path, scale in ((t1, "minmax"), (t2, "none")):
        out = run("fit", "--data", str(gaussians_csv), "--labels-col", "label",
                  "--k-max", "2", "--scale", scale, "--out-tree", str(path))
        assert out.returncode == 0, out.stderr
    assert t1.read_text() != t2.read_text()


def test_exit_2_usage_errors(gaussians_csv):
    assert run("fit", "--data", str(gaussians_csv)).returncode == 2  # no --k-max
    assert run("fit", "--data", "x.csv", "--k-max", "2",
               "--gamma", "-1").returncode == 2
    assert run("fit", "--data", "x.csv", "--k-max", "0").returncode == 2
    assert run("nonsense").returncode == 2
    assert run().returncode == 2


def test_exit_1_runtime_errors(tmp_path, gaussians_csv):
    missing = run("fit", "--data", str(tmp_path / "nope.csv"), "--k-max", "2")
    assert missing.returncode == 1
    assert missing.stderr.strip()

    # chi2 needs non-negative features; raw gaussians have negatives
    chi2 = run("fit", "--data", str(gaussians_csv), "--labels-col", "label",
               "--k-max", "2", "--kernel", "chi2", "--scale", "none")
    assert chi2.returncode == 1

    capped = run("fit", "--data", str(gaussians_csv), "--labels-col", "label",
                 "--k-max", "2", "--max-samples", "10")
    assert capped.returncode == 1

    bad_tree = tmp_path / "bad.json"
    bad_tree.write_text("{broken")
    pred = run("predict", "--tree", str(bad_tree), "--data", str(gaussians_csv))
    assert pred.returncode == 1


def test_bench_report(tmp_path, gaussians_csv):
    report_path = tmp_path / "report.json"
    out = run("bench", "--data", str(gaussians_csv), "--labels-col", "label",
              "--k-max", "2", "--runs", "3", "--seed", "5",
              "--method", "both", "--out-report", str(report_path))
    assert out.returncode == 0, out.stderr
    report = json.loads(report_path.read_text())
    assert set(report) == {"kauri", "kmeans-dt"}
    for section in report.values():
        assert len(section["runs"]) == 3
        seeds = [r["seed"] for r in section["runs"]]
        assert seeds == [5, 6, 7]  # seed + run index
        for r in section["runs"]:
            assert "wad" in r and "waes" in r and "ari" in r
        assert "wad" in section["aggregate"]
    # stdout mirrors the aggregates as key=value lines
    assert any(line.startswith("kauri.") for line in out.stdout.splitlines())


def test_bench_single_run_std_null(tmp_path, gaussians_csv):
    report_path = tmp_path / "r1.json"
    out = run("bench", "--data", str(gaussians_csv), "--labels-col", "label",
              "--k-max", "2", "--runs", "1", "--out-report", str(report_path))
    assert out.returncode == 0, out.stderr
    report = json.loads(report_path.read_text())
    assert set(report) == {"runs", "aggregate"}  # single method: flat layout
    assert report["aggregate"]["wad"]["std"] is None


def test_kkmeans_histogram(tmp_path, gaussians_csv):
    hist_path = tmp_path / "hist.json"
    out = run("kkmeans", "--data", str(gaussians_csv), "--labels-col", "label",
              "--k", "3", "--runs", "12", "--seed", "2",
              "--out-hist", str(hist_path))
    assert out.returncode == 0, out.stderr
    payload = json.loads(out.stdout)
    assert payload["k"] == 3
    assert payload["runs"] == 12
    hist = payload["histogram"]
    assert set(hist) <= {"1", "2", "3"}
    assert sum(hist.values()) == 12
    assert json.loads(hist_path.read_text()) == payload
