"""Slow reference implementations the fast code is checked against.

Everything here favours obviousness over speed: double loops, from-scratch
recomputation, explicit enumeration.  Tests treat these as ground truth.
"""

import numpy as np

from kauri.masses import objective_from_labels


def brute_mass(kernel, rows, cols):
    """Plain double-loop kernel mass, multiset semantics included."""
    total = 0.0
    for r in rows:
        for c in cols:
            total += kernel[r, c]
    return total


def brute_objective(kernel, labels, n_clusters=None):
    labels = np.asarray(labels)
    k = int(labels.max()) + 1 if n_clusters is None else n_clusters
    total = 0.0
    for c in range(k):
        members = np.flatnonzero(labels == c)
        if members.size:
            total += brute_mass(kernel, members, members) / members.size
    return total


def brute_score(kernel, labels, n_clusters=None):
    return float(np.trace(kernel)) - brute_objective(kernel, labels, n_clusters)


def move_delta(kernel, labels, order, position, left_cluster, right_cluster):
    """Objective change from relabelling order[:position] / order[position:]."""
    new = labels.copy()
    new[order[:position]] = left_cluster
    new[order[position:]] = right_cluster
    hi = max(int(labels.max()), left_cluster, right_cluster) + 1
    return objective_from_labels(kernel, new, hi) - objective_from_labels(kernel, labels)


def exhaustive_best_split(kernel, column, labels, leaf, source, max_clusters,
                          min_leaf_size=1, n_clusters=None):
    """Enumerate every boundary position and every legal destination pair.

    Mirrors the candidate set of the incremental search: transfers into
    non-empty clusters, one or two fresh cluster ids, and pair moves that
    leave at least one sample behind in the source.  Returns the first
    strictly best (gain, position, left_cluster, right_cluster) or None.
    """
    n_ids = int(labels.max()) + 1 if n_clusters is None else n_clusters
    samples = leaf[np.argsort(column[leaf], kind="stable")]
    vals = column[samples]
    base = objective_from_labels(kernel, labels, n_ids)
    best = None
    members_outside = int(np.sum(labels == source)) - len(leaf)
    for pos in range(1, len(samples)):
        if vals[pos - 1] == vals[pos]:
            continue
        if pos < min_leaf_size or len(samples) - pos < min_leaf_size:
            continue
        cands = []
        if n_ids + 1 <= max_clusters:
            cands += [(n_ids, source), (source, n_ids)]
        if n_ids + 2 <= max_clusters and members_outside >= 1:
            cands.append((n_ids, n_ids + 1))
        for t in range(n_ids):
            if t != source:
                cands += [(t, source), (source, t)]
        if members_outside >= 1:
            cands += [(a, b) for a in range(n_ids) for b in range(n_ids)
                      if a != source and b != source and a != b]
        for lc, rc in cands:
            new = labels.copy()
            new[samples[:pos]] = lc
            new[samples[pos:]] = rc
            g = objective_from_labels(kernel, new, max(n_ids, lc, rc) + 1) - base
            if best is None or g > best[0] + 1e-12:
                best = (g, pos, lc, rc)
    return best


def ari_pair_counts(a, b):
    """Adjusted Rand index straight from agreeing/disagreeing sample pairs."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = len(a)
    same_a = same_b = same_both = 0
    pairs = n * (n - 1) // 2
    for i in range(n):
        for j in range(i + 1, n):
            sa = a[i] == a[j]
            sb = b[i] == b[j]
            same_a += sa
            same_b += sb
            same_both += sa and sb
    if pairs == 0:
        return 1.0
    expected = same_a * same_b / pairs
    maximum = (same_a + same_b) / 2.0
    if maximum == expected:
        return 1.0
    return (same_both - expected) / (maximum - expected)


def lloyd_labels(data, init_labels, max_iter=300):
    """Input-space Lloyd iterations with the same conventions as the kernel
    form: empty clusters stay empty, distance ties go to the lowest id,
    stop on a label fixpoint."""
    x = np.asarray(data, dtype=float)
    labels = np.asarray(init_labels).copy()
    k = int(labels.max()) + 1
    for _ in range(max_iter):
        dists = np.full((len(x), k), np.inf)
        for c in range(k):
            members = np.flatnonzero(labels == c)
            if members.size == 0:
                continue
            center = x[members].mean(axis=0)
            dists[:, c] = ((x - center) ** 2).sum(axis=1)
        new = dists.argmin(axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
    return labels


def brute_gini_split(column, labels):
    """Best threshold by exhaustive weighted-Gini evaluation of one column."""
    order = np.argsort(column, kind="stable")
    vals = column[order]
    labs = labels[order]
    n = len(vals)

    def gini(block):
        if len(block) == 0:
            return 0.0
        _, counts = np.unique(block, return_counts=True)
        p = counts / len(block)
        return 1.0 - float((p ** 2).sum())

    parent = gini(labs) * n
    best = None
    for pos in range(1, n):
        if vals[pos - 1] == vals[pos]:
            continue
        drop = parent - gini(labs[:pos]) * pos - gini(labs[pos:]) * (n - pos)
        if best is None or drop > best[0] + 1e-12:
            best = (drop, pos)
    return best
