"""Kernel masses of a two-level partition (samples -> leaves -> clusters).

The kernel mass of two index sets E, F is sum_{i in E, j in F} k[i, j].
It is the only statistic the split gains need: a cluster's contribution to
the clustering objective is its self-mass divided by its size, so the whole
objective can be tracked through a handful of cached mass tables:

- ``leaf_sample[p, i]``    mass({i} x leaf p)
- ``cluster_sample[k, i]`` mass({i} x cluster k)
- ``cluster_pair[k, l]``   mass(cluster k x cluster l)

All tables are recomputed from scratch once per training iteration, which
keeps them numerically honest at O(n^2) per iteration.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, IndexOutOfRangeError
from .validation import as_index_array, as_square_matrix


@dataclass
class Partition:
    """Dense two-level assignment: sample -> leaf -> cluster.

    ``leaf_of_sample`` maps each sample to a leaf id in [0, n_leaves);
    ``cluster_of_leaf`` maps each leaf to a cluster id in [0, n_clusters).
    """

    leaf_of_sample: np.ndarray
    cluster_of_leaf: np.ndarray

    def __post_init__(self):
        self.leaf_of_sample = np.asarray(self.leaf_of_sample, dtype=np.int64)
        self.cluster_of_leaf = np.asarray(self.cluster_of_leaf, dtype=np.int64)
        if self.leaf_of_sample.ndim != 1 or self.cluster_of_leaf.ndim != 1:
            raise DimensionMismatchError("partition arrays must be 1-dimensional")
        n_leaves = self.cluster_of_leaf.shape[0]
        if n_leaves < 1:
            raise DimensionMismatchError("partition needs at least one leaf")
        if self.leaf_of_sample.size == 0:
            raise DimensionMismatchError("partition needs at least one sample")
        if self.leaf_of_sample.min() < 0 or self.leaf_of_sample.max() >= n_leaves:
            raise IndexOutOfRangeError("leaf ids must lie in [0, n_leaves)")
        if self.cluster_of_leaf.min() < 0:
            raise IndexOutOfRangeError("cluster ids must be non-negative")

    @property
    def n_samples(self):
        return self.leaf_of_sample.shape[0]

    @property
    def n_leaves(self):
        return self.cluster_of_leaf.shape[0]

    @property
    def n_clusters(self):
        return int(self.cluster_of_leaf.max()) + 1

    @property
    def cluster_of_sample(self):
        return self.cluster_of_leaf[self.leaf_of_sample]


@dataclass
class MassCache:
    """Cached kernel masses for one partition state."""

    leaf_sample: np.ndarray  # (n_leaves, n)
    cluster_sample: np.ndarray  # (n_clusters, n)
    cluster_pair: np.ndarray  # (n_clusters, n_clusters)
    cluster_sizes: np.ndarray  # (n_clusters,)
    leaf_sizes: np.ndarray  # (n_leaves,)

    @property
    def cluster_self(self):
        """Self-mass of every cluster, mass(C_k x C_k)."""
        return np.diagonal(self.cluster_pair)


def kernel_mass(kernel, rows, cols):
    """Total kernel value between two index sets (multiset semantics).

    Repeated indices count as many times as they appear, which makes the
    mass bilinear in both arguments.
    """
    k = np.asarray(kernel)
    n = k.shape[0]
    r = as_index_array(rows, n, "rows")
    c = as_index_array(cols, n, "cols")
    if r.size == 0 or c.size == 0:
        return 0.0
    return float(k[np.ix_(r, c)].sum())


def recompute_masses(kernel, partition, n_clusters=None):
    """Build a fresh :class:`MassCache` for ``partition`` from the kernel.

    ``n_clusters`` widens the cluster tables beyond the ids present, which
    the trainer uses to reserve room for clusters about to be created.
    """
    k = as_square_matrix(kernel)
    n = k.shape[0]
    if partition.n_samples != n:
        raise DimensionMismatchError(
            f"partition covers {partition.n_samples} samples, kernel has {n}"
        )
    n_leaves = partition.n_leaves
    n_cl = partition.n_clusters if n_clusters is None else int(n_clusters)
    if n_cl < partition.n_clusters:
        raise IndexOutOfRangeError("n_clusters is smaller than the ids in use")

    leaf_sample = np.zeros((n_leaves, n))
    for p in range(n_leaves):
        members = np.flatnonzero(partition.leaf_of_sample == p)
        if members.size:
            leaf_sample[p] = k[members].sum(axis=0)

    cluster_sample = np.zeros((n_cl, n))
    np.add.at(cluster_sample, partition.cluster_of_leaf, leaf_sample)

    cluster_of_sample = partition.cluster_of_sample
    cluster_pair = np.zeros((n_cl, n_cl))
    for c in range(n_cl):
        members = np.flatnonzero(cluster_of_sample == c)
        if members.size:
            cluster_pair[:, c] = cluster_sample[:, members].sum(axis=1)

    cluster_sizes = np.bincount(cluster_of_sample, minlength=n_cl)
    leaf_sizes = np.bincount(partition.leaf_of_sample, minlength=n_leaves)
    return MassCache(leaf_sample, cluster_sample, cluster_pair, cluster_sizes, leaf_sizes)


def partition_objective(cache):
    """Sum over non-empty clusters of self-mass / size (to be maximised)."""
    sizes = cache.cluster_sizes
    used = sizes > 0
    if not used.any():
        return 0.0
    return float((cache.cluster_self[used] / sizes[used]).sum())


def kmeans_score(kernel, cache):
    """Within-cluster scatter in feature space (to be minimised).

    Equals trace(kernel) minus :func:`partition_objective`; for the linear
    kernel this is exactly the classic k-means inertia.
    """
    k = np.asarray(kernel)
    return float(np.trace(k)) - partition_objective(cache)


def objective_from_labels(kernel, labels, n_clusters=None):
    """Objective of a flat clustering, bypassing the leaf level."""
    labels = np.asarray(labels, dtype=np.int64)
    part = Partition(np.arange(labels.shape[0]), labels)
    return partition_objective(recompute_masses(kernel, part, n_clusters))
