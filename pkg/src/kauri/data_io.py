"""Dataset loading, preprocessing, synthetic generators and result writers.

CSV columns are interpreted through a schema mapping column name (or
position) to a kind:

- ``numeric``      parsed as float; empty / ``?`` / ``NA``-style cells are
                   missing and drop the row
- ``categorical``  one-hot encoded, levels sorted, missing drops the row
- ``vote``         yes/no/unknown encoded as +1 / -1 / 0 (``?`` means
                   unknown, not missing)
- ``label``        kept aside as the ground-truth column
- ``drop``         ignored

Unlisted columns default to ``numeric``.  Row order is preserved for the
rows that survive missing-value dropping.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    ConfigError,
    EmptyAfterDroppingError,
    ParseError,
    SchemaViolationError,
)
from .validation import as_float_matrix

COLUMN_KINDS = ("numeric", "categorical", "vote", "label", "drop")
MISSING_TOKENS = {"", "?", "na", "n/a", "nan", "null"}
VOTE_YES = {"y", "yes", "1"}
VOTE_NO = {"n", "no", "-1"}
VOTE_UNKNOWN = {"?", "", "unknown", "0"}


@dataclass
class Dataset:
    data: np.ndarray
    feature_names: list
    labels: np.ndarray | None = None
    label_names: list | None = None
    n_dropped: int = 0
    row_ids: np.ndarray | None = None  # original row numbers of kept rows


def _normalize_schema(schema, header, n_cols):
    kinds = ["numeric"] * n_cols
    if schema is None:
        return kinds
    by_name = {name: i for i, name in enumerate(header)} if header else {}
    for key, kind in schema.items():
        if kind not in COLUMN_KINDS:
            raise SchemaViolationError(f"unknown column kind {kind!r} for {key!r}")
        if isinstance(key, int) or (isinstance(key, str) and key.lstrip("-").isdigit()):
            idx = int(key)
        elif key in by_name:
            idx = by_name[key]
        else:
            raise SchemaViolationError(f"schema column {key!r} not found in header")
        if not 0 <= idx < n_cols:
            raise SchemaViolationError(f"schema column {key!r} out of range")
        kinds[idx] = kind
    if kinds.count("label") > 1:
        raise SchemaViolationError("at most one label column is allowed")
    return kinds


def _looks_like_header(row, kinds):
    for cell, kind in zip(row, kinds):
        token = cell.strip().lower()
        if kind == "numeric":
            if token in MISSING_TOKENS:
                continue
            try:
                float(cell)
            except ValueError:
                return True
        elif kind == "vote":
            if token not in VOTE_YES | VOTE_NO | VOTE_UNKNOWN:
                return True
    return False


def load_csv(path, schema=None, has_header=None):
    """Load a CSV file into a :class:`Dataset` under ``schema``.

    ``has_header=None`` auto-detects by checking whether the first row is
    parseable under the schema.  Rows with missing numeric or categorical
    cells are dropped (counted in ``n_dropped``).
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ParseError(f"{path} is empty")
    n_cols = len(rows[0])
    if any(len(r) != n_cols for r in rows):
        raise ParseError(f"{path} has rows of unequal length")

    header = None
    if has_header is True or (
        has_header is None
        and _looks_like_header(rows[0], _normalize_schema(schema, rows[0], n_cols))
    ):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise EmptyAfterDroppingError(f"{path} has a header but no data rows")
    kinds = _normalize_schema(schema, header, n_cols)
    if header is None:
        header = [f"c{i}" for i in range(n_cols)]

    kept, dropped = [], 0
    for r, row in enumerate(rows):
        missing = False
        for cell, kind in zip(row, kinds):
            token = cell.strip().lower()
            if kind in ("numeric", "categorical", "label") and token in MISSING_TOKENS:
                missing = True
                break
        if missing:
            dropped += 1
        else:
            kept.append((r, row))
    if not kept:
        raise EmptyAfterDroppingError(f"every row of {path} had missing values")

    columns, names = [], []
    labels = None
    label_names = None
    for j, kind in enumerate(kinds):
        cells = [row[j].strip() for _, row in kept]
        if kind == "drop":
            continue
        if kind == "numeric":
            try:
                columns.append(np.array([float(c) for c in cells]))
            except ValueError as exc:
                raise ParseError(f"column {header[j]!r}: {exc}") from exc
            names.append(header[j])
        elif kind == "vote":
            col = np.empty(len(cells))
            for i, c in enumerate(cells):
                token = c.lower()
                if token in VOTE_YES:
                    col[i] = 1.0
                elif token in VOTE_NO:
                    col[i] = -1.0
                elif token in VOTE_UNKNOWN:
                    col[i] = 0.0
                else:
                    raise ParseError(f"column {header[j]!r}: bad vote value {c!r}")
            columns.append(col)
            names.append(header[j])
        elif kind == "categorical":
            levels = sorted(set(cells))
            for level in levels:
                columns.append(np.array([1.0 if c == level else 0.0 for c in cells]))
                names.append(f"{header[j]}={level}")
        elif kind == "label":
            values = sorted(set(cells))
            mapping = {v: i for i, v in enumerate(values)}
            labels = np.array([mapping[c] for c in cells], dtype=np.int64)
            label_names = values

    if not columns:
        raise SchemaViolationError("schema left no feature columns")
    return Dataset(
        data=np.column_stack(columns),
        feature_names=names,
        labels=labels,
        label_names=label_names,
        n_dropped=dropped,
        row_ids=np.array([r for r, _ in kept], dtype=np.int64),
    )


def minmax_scale(data):
    """Map every column to [0, 1]; constant columns become 0."""
    x = as_float_matrix(data)
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    out = x - lo
    nonzero = span > 0
    out[:, nonzero] /= span[nonzero]
    out[:, ~nonzero] = 0.0
    return out


# ---------------------------------------------------------------------------
# synthetic datasets


def gen_rotated_gaussians(n, theta, seed=None):
    """Two isotropic Gaussians (variance 0.2) a fixed distance sqrt(2)
    apart, with the separating direction rotated by ``theta`` radians."""
    if n < 2:
        raise ConfigError("n must be >= 2")
    rng = np.random.default_rng(seed)
    half = np.sqrt(2.0) / 2.0
    center = half * np.array([np.cos(theta), np.sin(theta)])
    n1 = n // 2
    n0 = n - n1
    sd = np.sqrt(0.2)
    data = np.vstack([
        rng.normal(size=(n0, 2)) * sd - center,
        rng.normal(size=(n1, 2)) * sd + center,
    ])
    labels = np.repeat([0, 1], [n0, n1])
    return data, labels


def gen_imm_pathology(n_per_side=150, epsilon=0.05, v=1000.0, seed=None):
    """Two tight Gaussian blobs at (-2, 0) and (2, 0) plus two far points
    at (-2, v) and (2, v): a worst case for greedy centroid-based trees,
    whose best first cut is on the second feature."""
    if n_per_side < 1:
        raise ConfigError("n_per_side must be >= 1")
    rng = np.random.default_rng(seed)
    sd = np.sqrt(epsilon)
    data = np.vstack([
        rng.normal(size=(n_per_side, 2)) * sd + [-2.0, 0.0],
        rng.normal(size=(n_per_side, 2)) * sd + [2.0, 0.0],
        [[-2.0, float(v)], [2.0, float(v)]],
    ])
    labels = np.repeat([0, 1, 2], [n_per_side, n_per_side, 2])
    return data, labels


def subsample(data, fraction, seed=None):
    """Uniform subsample without replacement, keeping row order.

    Returns ``(subset, indices)``; ``fraction=1`` returns everything.
    """
    x = np.asarray(data)
    if not 0 < fraction <= 1:
        raise ConfigError(f"fraction must be in (0, 1], got {fraction}")
    n = x.shape[0]
    size = max(1, int(np.floor(fraction * n)))
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(n, size=size, replace=False))
    return x[idx], idx


# ---------------------------------------------------------------------------
# result writers


def write_labels(path, labels, sample_ids=None):
    """CSV with a sample_id,cluster row per sample."""
    labels = np.asarray(labels)
    ids = np.arange(labels.shape[0]) if sample_ids is None else np.asarray(sample_ids)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "cluster"])
        for i, lab in zip(ids, labels):
            writer.writerow([int(i), int(lab)])


def aggregate_runs(runs):
    """Mean and sample std of every numeric metric across run dicts.

    Metrics missing from a run are skipped; std is null for single runs.
    """
    keys = sorted({k for run in runs for k, v in run.items() if isinstance(v, (int, float)) and k != "seed"})
    out = {}
    for key in keys:
        values = [run[key] for run in runs if key in run and run[key] is not None]
        if not values:
            continue
        arr = np.asarray(values, dtype=np.float64)
        out[key] = {
            "mean": float(arr.mean()),
            "std": float(arr.std(ddof=1)) if arr.size > 1 else None,
        }
    return out


def write_report(path, report):
    """Pretty-printed JSON with sorted keys, so reruns diff cleanly."""
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def report_lines(report, prefix=""):
    """Flatten a report dict into sorted ``key=value`` lines."""
    lines = []

    def walk(value, key):
        if isinstance(value, dict):
            for k in sorted(value):
                walk(value[k], f"{key}.{k}" if key else str(k))
        elif isinstance(value, (list, tuple)):
            for i, v in enumerate(value):
                walk(v, f"{key}[{i}]")
        else:
            lines.append(f"{key}={value}")

    walk(report, prefix)
    return lines
