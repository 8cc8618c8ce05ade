"""Random small problem instances shared by the gain and split-search tests."""

import numpy as np

from kauri import kernel_mass
from kauri.gains import ClusterState, SplitMasses
from kauri.masses import Partition, recompute_masses

KERNEL_ORDER = ("linear", "rbf", "laplacian", "chi2", "additive_chi2", "polynomial")


def build_split_masses(kernel, labels, leaf, left):
    """SplitMasses for an explicit leaf/left-block pair, by brute force."""
    n_ids = int(labels.max()) + 1
    right = np.setdiff1d(leaf, left)

    def cross(block):
        return np.array([
            kernel_mass(kernel, block, np.flatnonzero(labels == c))
            for c in range(n_ids)
        ])

    return SplitMasses(
        source=int(labels[leaf[0]]),
        leaf_size=len(leaf),
        leaf_self=kernel_mass(kernel, leaf, leaf),
        leaf_cluster=cross(leaf),
        left_size=len(left),
        right_size=len(right),
        left_self=kernel_mass(kernel, left, left),
        right_self=kernel_mass(kernel, right, right),
        left_cluster=cross(left),
        right_cluster=cross(right),
    )


def random_leaf_instance(rng, kernel_fn):
    """Labels plus one multi-sample leaf inside a random cluster.

    Returns None when the drawn source cluster is a singleton.  Data is
    kept non-negative so every kernel family applies.
    """
    n = int(rng.integers(6, 22))
    d = int(rng.integers(1, 4))
    x = np.abs(rng.normal(size=(n, d)))
    k = kernel_fn(x)
    max_clusters = int(rng.integers(2, 6))
    n_ids = int(rng.integers(1, max_clusters + 1))
    labels = rng.integers(0, n_ids, n)
    labels[:n_ids] = np.arange(n_ids)
    sizes = np.bincount(labels, minlength=n_ids)
    self_mass = np.array([
        kernel_mass(k, np.flatnonzero(labels == c), np.flatnonzero(labels == c))
        for c in range(n_ids)
    ])
    stats = ClusterState(sizes, self_mass, max_clusters)
    src = int(rng.integers(0, n_ids))
    members = np.flatnonzero(labels == src)
    if members.size < 2:
        return None
    leaf_sz = int(rng.integers(2, members.size + 1))
    leaf = np.sort(rng.choice(members, leaf_sz, replace=False))
    return {
        "x": x, "kernel": k, "labels": labels, "stats": stats,
        "source": src, "leaf": leaf, "n_ids": n_ids, "max_clusters": max_clusters,
    }


def random_partition_instance(rng, kernel_fn):
    """A full leaf partition with caches, plus one target leaf to split.

    Returns None when the drawn leaf has fewer than 2 samples.
    """
    n = int(rng.integers(8, 20))
    d = int(rng.integers(1, 3))
    x = np.abs(rng.normal(size=(n, d)))
    k = kernel_fn(x)
    max_clusters = int(rng.integers(2, 6))
    n_ids = int(rng.integers(1, min(max_clusters, n // 3) + 1))
    lo = n_ids
    hi = min(n // 2, n_ids + 3)
    n_leaves = int(rng.integers(lo, hi + 1)) if hi > lo else lo
    leaf_of = rng.integers(0, n_leaves, n)
    leaf_of[:n_leaves] = np.arange(n_leaves)
    cluster_of_leaf = rng.integers(0, n_ids, n_leaves)
    cluster_of_leaf[:n_ids] = np.arange(n_ids)
    part = Partition(leaf_of, cluster_of_leaf)
    cache = recompute_masses(k, part, n_ids)
    stats = ClusterState(cache.cluster_sizes, cache.cluster_self.copy(), max_clusters)
    target_leaf = int(rng.integers(0, n_leaves))
    leaf = np.flatnonzero(leaf_of == target_leaf)
    if leaf.size < 2:
        return None
    return {
        "x": x, "kernel": k, "labels": part.cluster_of_sample,
        "partition": part, "cache": cache, "stats": stats,
        "leaf_row": target_leaf, "leaf": leaf,
        "source": int(cluster_of_leaf[target_leaf]),
        "n_ids": n_ids, "max_clusters": max_clusters,
    }
