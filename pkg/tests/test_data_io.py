import json

import numpy as np
import pytest

from kauri.data_io import (
    aggregate_runs,
    gen_imm_pathology,
    gen_rotated_gaussians,
    load_csv,
    minmax_scale,
    report_lines,
    subsample,
    write_labels,
    write_report,
)
from kauri.exceptions import (
    ConfigError,
    EmptyAfterDroppingError,
    ParseError,
    SchemaViolationError,
)


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


# ---------------------------------------------------------------------------
# CSV loading


def test_plain_numeric_no_header(tmp_path):
    ds = load_csv(write(tmp_path, "1,2\n3,4\n5,6\n"))
    assert ds.data.tolist() == [[1, 2], [3, 4], [5, 6]]
    assert ds.feature_names == ["c0", "c1"]
    assert ds.labels is None
    assert ds.n_dropped == 0
    assert ds.row_ids.tolist() == [0, 1, 2]


def test_header_auto_detected(tmp_path):
    ds = load_csv(write(tmp_path, "x,y\n1,2\n3,4\n"))
    assert ds.feature_names == ["x", "y"]
    assert ds.data.shape == (2, 2)


def test_header_override(tmp_path):
    # numbers-only first row stays data unless has_header=True
    ds = load_csv(write(tmp_path, "1,2\n3,4\n"), has_header=True)
    assert ds.feature_names == ["1", "2"]
    assert ds.data.tolist() == [[3, 4]]


def test_missing_rows_dropped_and_counted(tmp_path):
    ds = load_csv(write(tmp_path, "x,y\n1,2\n?,4\n5,\n7,8\n"))
    assert ds.data.tolist() == [[1, 2], [7, 8]]
    assert ds.n_dropped == 2
    assert ds.row_ids.tolist() == [0, 3]


def test_vote_encoding(tmp_path):
    text = "v1,v2\ny,n\nn,?\n?,y\n"
    ds = load_csv(write(tmp_path, text), schema={"v1": "vote", "v2": "vote"})
    # unknown votes are a value (0), not a missing cell: nothing dropped
    assert ds.n_dropped == 0
    assert ds.data.tolist() == [[1, -1], [-1, 0], [0, 1]]


def test_categorical_one_hot(tmp_path):
    text = "color,size\nred,1\nblue,2\nred,3\n"
    ds = load_csv(write(tmp_path, text), schema={"color": "categorical"})
    assert ds.feature_names == ["color=blue", "color=red", "size"]
    one_hot = ds.data[:, :2]
    assert one_hot.sum(axis=1).tolist() == [1, 1, 1]
    assert one_hot[:, 1].tolist() == [1, 0, 1]  # red indicator


def test_label_column(tmp_path):
    text = "x,species\n1,b\n2,a\n3,b\n"
    ds = load_csv(write(tmp_path, text), schema={"species": "label"})
    assert ds.label_names == ["a", "b"]
    assert ds.labels.tolist() == [1, 0, 1]
    assert ds.feature_names == ["x"]


def test_drop_column(tmp_path):
    ds = load_csv(write(tmp_path, "a,b\n1,2\n3,4\n"), schema={"a": "drop"})
    assert ds.feature_names == ["b"]
    assert ds.data.tolist() == [[2], [4]]


def test_schema_by_index(tmp_path):
    ds = load_csv(write(tmp_path, "1,2\n3,4\n"), schema={1: "drop"})
    assert ds.data.tolist() == [[1], [3]]
    ds = load_csv(write(tmp_path, "1,2\n3,4\n"), schema={"0": "drop"})
    assert ds.data.tolist() == [[2], [4]]


def test_schema_errors(tmp_path):
    p = write(tmp_path, "x,y\n1,2\n")
    with pytest.raises(SchemaViolationError):
        load_csv(p, schema={"x": "widget"})
    with pytest.raises(SchemaViolationError):
        load_csv(p, schema={"z": "numeric"})
    with pytest.raises(SchemaViolationError):
        load_csv(p, schema={"5": "numeric"})
    with pytest.raises(SchemaViolationError):
        load_csv(p, schema={"x": "label", "y": "label"})
    with pytest.raises(SchemaViolationError):
        load_csv(p, schema={"x": "drop", "y": "label"})  # no features left


def test_parse_errors(tmp_path):
    with pytest.raises(ParseError):
        load_csv(write(tmp_path, ""))
    with pytest.raises(ParseError):
        load_csv(write(tmp_path, "1,2\n3\n"))
    with pytest.raises(ParseError):
        load_csv(write(tmp_path, "x\nabc\n"), has_header=True)
    with pytest.raises(EmptyAfterDroppingError):
        load_csv(write(tmp_path, "x,y\n?,1\n2,?\n"))
    with pytest.raises(EmptyAfterDroppingError):
        load_csv(write(tmp_path, "x,y\n"))


def test_vote_bad_token(tmp_path):
    with pytest.raises(ParseError):
        load_csv(write(tmp_path, "v\nmaybe\n"), schema={"v": "vote"})


# ---------------------------------------------------------------------------
# scaling and sampling


def test_minmax_scale():
    x = np.array([[0.0, 5.0, 7.0], [10.0, 5.0, 3.0], [5.0, 5.0, 5.0]])
    out = minmax_scale(x)
    assert out[:, 0].tolist() == [0.0, 1.0, 0.5]
    assert out[:, 1].tolist() == [0.0, 0.0, 0.0]  # constant column
    assert out.min() >= 0.0 and out.max() <= 1.0
    assert x[0, 0] == 0.0  # input untouched


def test_subsample():
    x = np.arange(40).reshape(20, 2)
    sub, idx = subsample(x, 0.5, seed=3)
    assert sub.shape == (10, 2)
    assert np.array_equal(idx, np.sort(idx))
    assert np.array_equal(sub, x[idx])
    again, idx2 = subsample(x, 0.5, seed=3)
    assert np.array_equal(idx, idx2)
    everything, idx3 = subsample(x, 1.0, seed=0)
    assert np.array_equal(everything, x)
    assert len(set(idx3.tolist())) == 20
    with pytest.raises(ConfigError):
        subsample(x, 0.0)
    with pytest.raises(ConfigError):
        subsample(x, 1.5)


# ---------------------------------------------------------------------------
# generators


def test_rotated_gaussians_geometry():
    data, labels = gen_rotated_gaussians(4000, np.pi / 4, seed=0)
    assert data.shape == (4000, 2)
    assert np.bincount(labels).tolist() == [2000, 2000]
    gap = data[labels == 1].mean(axis=0) - data[labels == 0].mean(axis=0)
    assert np.linalg.norm(gap) == pytest.approx(np.sqrt(2), abs=0.05)
    angle = np.arctan2(gap[1], gap[0])
    assert angle == pytest.approx(np.pi / 4, abs=0.05)
    assert data[labels == 0].var(axis=0) == pytest.approx([0.2, 0.2], abs=0.03)


def test_rotated_gaussians_determinism_and_guard():
    a, _ = gen_rotated_gaussians(50, 0.3, seed=7)
    b, _ = gen_rotated_gaussians(50, 0.3, seed=7)
    assert np.array_equal(a, b)
    with pytest.raises(ConfigError):
        gen_rotated_gaussians(1, 0.0)


def test_imm_pathology_geometry():
    data, labels = gen_imm_pathology(seed=0)
    assert data.shape == (302, 2)
    assert np.bincount(labels).tolist() == [150, 150, 2]
    assert data[-2:].tolist() == [[-2.0, 1000.0], [2.0, 1000.0]]
    assert data[:150, 0].mean() == pytest.approx(-2.0, abs=0.1)
    assert data[150:300, 0].mean() == pytest.approx(2.0, abs=0.1)
    assert data[:300, 1].var() == pytest.approx(0.05, abs=0.02)
    with pytest.raises(ConfigError):
        gen_imm_pathology(n_per_side=0)


# ---------------------------------------------------------------------------
# writers and aggregation


def test_write_labels(tmp_path):
    p = tmp_path / "labels.csv"
    write_labels(p, np.array([2, 0, 1]), sample_ids=np.array([10, 20, 30]))
    assert p.read_text() == "sample_id,cluster\n10,2\n20,0\n30,1\n"
    write_labels(p, np.array([1, 1]))
    assert p.read_text() == "sample_id,cluster\n0,1\n1,1\n"


def test_aggregate_runs():
    runs = [
        {"seed": 0, "ari": 0.5, "wad": 2.0},
        {"seed": 1, "ari": 0.7, "wad": 3.0},
        {"seed": 2, "ari": 0.9},
    ]
    agg = aggregate_runs(runs)
    assert "seed" not in agg
    assert agg["ari"]["mean"] == pytest.approx(0.7)
    assert agg["ari"]["std"] == pytest.approx(0.2)
    assert agg["wad"]["mean"] == pytest.approx(2.5)
    single = aggregate_runs([{"ari": 0.4}])
    assert single["ari"]["std"] is None


def test_write_report_and_lines(tmp_path):
    report = {"aggregate": {"ari": {"mean": 0.5, "std": None}}, "runs": [{"seed": 0}]}
    p = tmp_path / "report.json"
    write_report(p, report)
    text = p.read_text()
    assert text.endswith("\n")
    assert json.loads(text) == report
    lines = report_lines(report)
    assert "aggregate.ari.mean=0.5" in lines
    assert "runs[0].seed=0" in lines
