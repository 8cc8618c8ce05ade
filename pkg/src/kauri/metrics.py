"""Clustering and explainability metrics.

Depth-style metrics take a tree plus the data to route through it, so they
weight every leaf by how many samples actually land there:

- weighted average depth counts nodes along the path, root included, so a
  single-split tree scores exactly 2;
- weighted average explanation size counts distinct (feature, direction)
  conditions along the path after merging repeats, plus one for the leaf,
  so it can never exceed the depth.
"""

import warnings

import numpy as np
from itertools import permutations
from scipy.optimize import linear_sum_assignment

from .exceptions import (
    DegenerateLabelingsWarning,
    LengthMismatchError,
    NonPositiveReferenceError,
)
from .tree import assign_leaves, leaf_info


def _paired_labels(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 1 or b.ndim != 1 or a.shape[0] != b.shape[0]:
        raise LengthMismatchError(
            f"label vectors must be 1-d and equally long, got {a.shape} and {b.shape}"
        )
    if a.shape[0] == 0:
        raise LengthMismatchError("label vectors must not be empty")
    return a, b


def contingency_table(a, b):
    """Co-occurrence counts; rows follow sorted unique values of ``a``."""
    a, b = _paired_labels(a, b)
    rows, a_enc = np.unique(a, return_inverse=True)
    cols, b_enc = np.unique(b, return_inverse=True)
    table = np.zeros((rows.size, cols.size), dtype=np.int64)
    np.add.at(table, (a_enc, b_enc), 1)
    return table, rows, cols


def adjusted_rand_index(a, b):
    """Chance-corrected pair-counting agreement between two labelings.

    1 for identical partitions, around 0 for independent ones; when both
    labelings are degenerate (agreement cannot exceed chance) the value is
    1 by convention, with a warning.
    """
    table, _, _ = contingency_table(a, b)
    n = int(table.sum())

    def comb2(x):
        x = np.asarray(x, dtype=np.float64)
        return x * (x - 1.0) / 2.0

    pair_both = comb2(table).sum()
    pair_a = comb2(table.sum(axis=1)).sum()
    pair_b = comb2(table.sum(axis=0)).sum()
    total = comb2(n)
    max_index = (pair_a + pair_b) / 2.0
    expected = pair_a * pair_b / total if total > 0 else 0.0
    denom = max_index - expected
    if denom == 0.0:
        warnings.warn(
            "both labelings are degenerate; adjusted rand index is 1 by convention",
            DegenerateLabelingsWarning,
        )
        return 1.0
    return float((pair_both - expected) / denom)


def unsupervised_accuracy(labels, reference):
    """Best achievable accuracy over one-to-one cluster-to-class matchings.

    Exhaustive search when both sides have at most 8 groups, otherwise an
    optimal-assignment solve on the contingency table.
    """
    table, _, _ = contingency_table(labels, reference)
    n = int(table.sum())
    rows, cols = table.shape
    if rows > cols:
        table = table.T
        rows, cols = cols, rows
    if cols <= 8:
        matched = max(
            sum(table[i, p[i]] for i in range(rows))
            for p in permutations(range(cols), rows)
        )
    else:
        r_idx, c_idx = linear_sum_assignment(table, maximize=True)
        matched = table[r_idx, c_idx].sum()
    return float(matched) / n


def weighted_average_depth(tree, data):
    """Mean number of nodes on the root-to-leaf path over routed samples."""
    info = leaf_info(tree)
    depth_of = {lid: rec["depth"] for lid, rec in info.items()}
    leaves = assign_leaves(tree, data)
    return float(np.mean([depth_of[int(l)] for l in leaves]))


def weighted_average_explanation_size(tree, data):
    """Mean explanation length over routed samples: distinct
    (feature, direction) conditions on the path, plus one for the leaf."""
    info = leaf_info(tree)
    size_of = {lid: len(set(rec["conditions"])) + 1 for lid, rec in info.items()}
    leaves = assign_leaves(tree, data)
    return float(np.mean([size_of[int(l)] for l in leaves]))


def normalized_score(score, reference):
    """Scatter of a partition relative to a reference partition's scatter."""
    if not reference > 0:
        raise NonPositiveReferenceError(f"reference score must be > 0, got {reference}")
    return float(score) / float(reference)


__all__ = [
    "adjusted_rand_index",
    "contingency_table",
    "normalized_score",
    "unsupervised_accuracy",
    "weighted_average_depth",
    "weighted_average_explanation_size",
]
