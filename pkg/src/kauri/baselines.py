"""Reference clustering pipelines the tree is benchmarked against.

- :func:`kernel_kmeans`: Lloyd iterations driven purely through the Gram
  matrix.  Clusters that lose all members stay empty (no re-seeding unless
  asked), which is exactly the failure mode the tree avoids by design.
- :func:`gini_tree`: a small best-first CART that explains a given labeling
  with axis-aligned splits under a leaf budget.
- :func:`kmeans_then_tree`: the two chained, i.e. cluster first, then fit a
  tree to the cluster labels and read predictions off the tree.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, IndexOutOfRangeError, KTooLargeError
from .split_search import midpoint_threshold, order_by_feature
from .tree import Node, Tree, count_leaves, predict as tree_predict
from .validation import as_float_matrix, as_labels, as_square_matrix


@dataclass
class KernelKMeansResult:
    labels: np.ndarray
    score: float  # within-cluster scatter in feature space, lower is better
    n_iter: int
    converged: bool
    n_nonempty: int


def count_nonempty(labels, n_clusters):
    """How many of the ``n_clusters`` ids actually hold samples."""
    return int((np.bincount(labels, minlength=n_clusters) > 0).sum())


def _cluster_stats(kernel, labels, n_clusters):
    n = kernel.shape[0]
    onehot = np.zeros((n, n_clusters))
    onehot[np.arange(n), labels] = 1.0
    sizes = onehot.sum(axis=0)
    colsum = kernel @ onehot  # mass({i} x C_k) for every sample/cluster
    quad = np.einsum("ik,ik->k", onehot, colsum)  # mass(C_k x C_k)
    return sizes, colsum, quad


def _scatter(diag_sum, sizes, quad):
    used = sizes > 0
    return float(diag_sum - (quad[used] / sizes[used]).sum())


def kernel_kmeans(kernel, n_clusters, *, init_labels=None, seed=None,
                  max_iter=300, tol=1e-9, reseed_empty=False):
    """Lloyd's algorithm through the kernel trick.

    Starts from uniform random labels (``seed``) unless ``init_labels`` is
    given.  Stops on a label fixpoint, when the scatter improves by less
    than ``tol``, or after ``max_iter`` sweeps.  Distances to empty
    clusters are infinite, so an emptied cluster never comes back unless
    ``reseed_empty`` moves the worst-fitting sample into it.
    """
    k = as_square_matrix(kernel)
    n = k.shape[0]
    if n_clusters < 1:
        raise ConfigError("n_clusters must be >= 1")
    if n_clusters > n:
        raise KTooLargeError(f"{n_clusters} clusters requested for {n} samples")
    if init_labels is None:
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, n_clusters, size=n)
    else:
        labels = as_labels(init_labels, n).copy()
        if labels.min() < 0 or labels.max() >= n_clusters:
            raise IndexOutOfRangeError(f"init labels must lie in [0, {n_clusters})")

    diag = np.ascontiguousarray(np.diagonal(k))
    diag_sum = float(diag.sum())
    sizes, colsum, quad = _cluster_stats(k, labels, n_clusters)
    score = _scatter(diag_sum, sizes, quad)
    n_iter = 0
    converged = False

    for n_iter in range(1, max_iter + 1):
        with np.errstate(divide="ignore", invalid="ignore"):
            dist = diag[:, None] - 2.0 * colsum / sizes + quad / sizes**2
        dist[:, sizes == 0] = np.inf
        new = np.argmin(dist, axis=1)  # ties go to the lowest cluster id

        if reseed_empty:
            for empty in np.flatnonzero(np.bincount(new, minlength=n_clusters) == 0):
                worst = int(np.argmax(dist[np.arange(n), new]))
                new[worst] = empty

        if np.array_equal(new, labels):
            converged = True
            break
        labels = new
        sizes, colsum, quad = _cluster_stats(k, labels, n_clusters)
        new_score = _scatter(diag_sum, sizes, quad)
        improved = score - new_score
        score = new_score
        if improved < tol:
            converged = True
            break

    return KernelKMeansResult(
        labels=labels.astype(np.int64),
        score=score,
        n_iter=n_iter,
        converged=converged,
        n_nonempty=count_nonempty(labels, n_clusters),
    )


# ---------------------------------------------------------------------------
# Gini tree


@dataclass
class _LeafSplit:
    decrease: float
    feature: int
    threshold: float
    position: int
    order: np.ndarray


def _majority(y_enc, n_classes):
    return int(np.argmax(np.bincount(y_enc, minlength=n_classes)))


def _purity_term(counts, size):
    # size * gini impurity = size - sum(counts^2) / size
    return size - float((counts.astype(np.float64) ** 2).sum()) / size


def _best_gini_split(x, y_enc, n_classes, samples):
    m = samples.size
    counts = np.bincount(y_enc[samples], minlength=n_classes)
    base = _purity_term(counts, m)
    if m < 2 or base <= 0.0:
        return None
    best = None
    for f in range(x.shape[1]):
        nu, svals = order_by_feature(x[:, f], samples)
        valid = svals[1:] > svals[:-1]
        if not valid.any():
            continue
        onehot = np.zeros((m, n_classes))
        onehot[np.arange(m), y_enc[nu]] = 1.0
        left_counts = np.cumsum(onehot, axis=0)[:-1]
        n_left = np.arange(1, m, dtype=np.float64)
        right_counts = counts - left_counts
        decrease = (
            np.einsum("lc,lc->l", left_counts, left_counts) / n_left
            + np.einsum("lc,lc->l", right_counts, right_counts) / (m - n_left)
            - float((counts.astype(np.float64) ** 2).sum()) / m
        )
        decrease[~valid] = -np.inf
        idx = int(np.argmax(decrease))  # earliest max => lowest threshold
        if decrease[idx] > 0 and (best is None or decrease[idx] > best.decrease):
            best = _LeafSplit(
                decrease=float(decrease[idx]),
                feature=f,
                threshold=midpoint_threshold(float(svals[idx]), float(svals[idx + 1])),
                position=idx + 1,
                order=nu,
            )
    return best


def gini_tree(data, labels, max_leaves=None):
    """Best-first CART on given labels: repeatedly split the leaf with the
    globally largest Gini impurity decrease until pure or out of budget.

    Leaf predictions are majority labels; ties inside a leaf go to the
    smallest label, ties between leaves to the earliest-created leaf, ties
    between splits to the lowest feature then lowest threshold.
    """
    x = as_float_matrix(data)
    n = x.shape[0]
    y = as_labels(labels, n)
    classes, y_enc = np.unique(y, return_inverse=True)
    n_classes = classes.size
    budget = n if max_leaves is None else int(max_leaves)
    if budget < 1:
        raise ConfigError("max_leaves must be >= 1")

    root = Node(leaf_id=0, cluster=int(classes[_majority(y_enc, n_classes)]))
    members = {0: np.arange(n)}
    node_of_leaf = {0: root}
    pending = {0: _best_gini_split(x, y_enc, n_classes, np.arange(n))}
    next_leaf = 1

    while len(members) < budget:
        best_leaf, best = -1, None
        for leaf in sorted(pending):
            split = pending[leaf]
            if split is not None and (best is None or split.decrease > best.decrease):
                best_leaf, best = leaf, split
        if best is None:
            break
        del pending[best_leaf]
        del members[best_leaf]
        left = np.sort(best.order[: best.position])
        right = np.sort(best.order[best.position:])
        node = node_of_leaf.pop(best_leaf)
        node.feature = best.feature
        node.threshold = best.threshold
        node.leaf_id = -1
        node.cluster = -1
        for side, child_samples in (("left", left), ("right", right)):
            child_id = next_leaf
            next_leaf += 1
            child = Node(
                leaf_id=child_id,
                cluster=int(classes[_majority(y_enc[child_samples], n_classes)]),
            )
            setattr(node, side, child)
            members[child_id] = child_samples
            node_of_leaf[child_id] = child
            pending[child_id] = _best_gini_split(x, y_enc, n_classes, child_samples)

    return Tree(root=root, n_features=x.shape[1])


# ---------------------------------------------------------------------------
# the chained baseline


@dataclass
class KMeansTreeResult:
    tree: Tree
    labels: np.ndarray  # tree predictions on the training data
    kmeans_labels: np.ndarray
    kmeans_score: float
    n_nonempty: int
    n_leaves: int


def kmeans_then_tree(data, kernel, n_clusters, *, leaves_per_cluster=1,
                     seed=None, max_iter=300, tol=1e-9, n_init=1,
                     reseed_empty=False):
    """Cluster with kernel k-means, then explain the labels with a Gini
    tree budgeted to ``leaves_per_cluster * n_clusters`` leaves.

    With ``n_init > 1`` the clustering with the best (lowest) scatter over
    independently seeded restarts is kept.
    """
    x = as_float_matrix(data)
    k = as_square_matrix(kernel)
    best = None
    for child_seed in np.random.SeedSequence(seed).generate_state(max(1, n_init)):
        result = kernel_kmeans(
            k, n_clusters, seed=int(child_seed), max_iter=max_iter, tol=tol,
            reseed_empty=reseed_empty,
        )
        if best is None or result.score < best.score:
            best = result
    fitted = gini_tree(x, best.labels, max_leaves=leaves_per_cluster * n_clusters)
    return KMeansTreeResult(
        tree=fitted,
        labels=tree_predict(fitted, x),
        kmeans_labels=best.labels,
        kmeans_score=best.score,
        n_nonempty=best.n_nonempty,
        n_leaves=count_leaves(fitted),
    )
