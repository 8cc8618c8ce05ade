"""Estimator wrappers so everything composes with the scikit-learn API.

All estimators follow the usual contract: hyperparameters in ``__init__``,
state only on ``fit`` (trailing-underscore attributes), ``get_params`` /
``set_params`` inherited from ``BaseEstimator``.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .baselines import gini_tree, kernel_kmeans, kmeans_then_tree
from .kernels import KernelSpec, compute_kernel, validate_kernel
from .tree import GrowConfig, count_leaves, grow_tree, predict as tree_predict
from .validation import as_float_matrix, as_labels


def _resolve_kernel(X, kernel, gamma, degree, coef0, allow_precomputed=False):
    if kernel == "precomputed":
        if not allow_precomputed:
            raise ValueError("precomputed kernels are not supported here")
        return None, validate_kernel(X)
    spec = KernelSpec(name=kernel, gamma=gamma, degree=degree, coef0=coef0)
    return spec, compute_kernel(X, spec)


class KauriTree(ClusterMixin, BaseEstimator):
    """Clustering tree grown by greedy kernel k-means objective ascent.

    Parameters mirror :class:`kauri.tree.GrowConfig` plus the kernel
    choice.  After ``fit``, ``labels_`` holds the training clustering and
    ``tree_`` the axis-aligned tree, which ``predict`` routes new data
    through (no kernel evaluations needed at prediction time).
    """

    def __init__(self, max_clusters=2, max_leaves=None, kernel="linear",
                 gamma="auto", degree=3, coef0=1.0, max_features=None,
                 min_leaf_size=1, gain_tolerance=0.0):
        self.max_clusters = max_clusters
        self.max_leaves = max_leaves
        self.kernel = kernel
        self.gamma = gamma
        self.degree = degree
        self.coef0 = coef0
        self.max_features = max_features
        self.min_leaf_size = min_leaf_size
        self.gain_tolerance = gain_tolerance

    def fit(self, X, y=None):
        X = as_float_matrix(X)
        self.kernel_spec_, gram = _resolve_kernel(
            X, self.kernel, self.gamma, self.degree, self.coef0
        )
        config = GrowConfig(
            max_clusters=self.max_clusters,
            max_leaves=self.max_leaves,
            max_features=self.max_features,
            min_leaf_size=self.min_leaf_size,
            gain_tolerance=self.gain_tolerance,
        )
        result = grow_tree(X, gram, config)
        self.tree_ = result.tree
        self.labels_ = result.labels
        self.leaf_of_sample_ = result.leaf_of_sample
        self.n_leaves_ = result.n_leaves
        self.n_clusters_ = result.n_clusters
        self.objective_ = result.objective
        self.score_ = result.score
        self.steps_ = result.steps
        self.converged_ = result.converged
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "tree_")
        return tree_predict(self.tree_, X)


class KernelKMeans(ClusterMixin, BaseEstimator):
    """Lloyd's k-means through a kernel, with the empty-cluster behaviour
    of the plain algorithm (pass ``reseed_empty=True`` to patch it).

    ``kernel="precomputed"`` treats X as the Gram matrix.  ``n_init``
    restarts keep the labeling with the lowest scatter.
    """

    def __init__(self, n_clusters=2, kernel="linear", gamma="auto", degree=3,
                 coef0=1.0, max_iter=300, tol=1e-9, n_init=1,
                 reseed_empty=False, random_state=None):
        self.n_clusters = n_clusters
        self.kernel = kernel
        self.gamma = gamma
        self.degree = degree
        self.coef0 = coef0
        self.max_iter = max_iter
        self.tol = tol
        self.n_init = n_init
        self.reseed_empty = reseed_empty
        self.random_state = random_state

    def fit(self, X, y=None):
        if self.kernel != "precomputed":
            X = as_float_matrix(X)
        _, gram = _resolve_kernel(
            X, self.kernel, self.gamma, self.degree, self.coef0, allow_precomputed=True
        )
        best = None
        seeds = np.random.SeedSequence(self.random_state).generate_state(max(1, self.n_init))
        for seed in seeds:
            result = kernel_kmeans(
                gram, self.n_clusters, seed=int(seed), max_iter=self.max_iter,
                tol=self.tol, reseed_empty=self.reseed_empty,
            )
            if best is None or result.score < best.score:
                best = result
        self.labels_ = best.labels
        self.score_ = best.score
        self.n_iter_ = best.n_iter
        self.converged_ = best.converged
        self.n_nonempty_ = best.n_nonempty
        self.n_features_in_ = X.shape[1]
        return self


class GiniTreeClassifier(ClassifierMixin, BaseEstimator):
    """Best-first CART on Gini impurity with a leaf budget."""

    def __init__(self, max_leaves=None):
        self.max_leaves = max_leaves

    def fit(self, X, y):
        X = as_float_matrix(X)
        y = as_labels(y, X.shape[0])
        self.classes_ = np.unique(y)
        self.tree_ = gini_tree(X, y, max_leaves=self.max_leaves)
        self.n_leaves_ = count_leaves(self.tree_)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "tree_")
        return tree_predict(self.tree_, X)


class KMeansTree(ClusterMixin, BaseEstimator):
    """Kernel k-means followed by a Gini tree fitted to its labels.

    ``labels_`` are the tree's predictions on the training data, i.e. the
    clustering actually explained by the tree.
    """

    def __init__(self, n_clusters=2, leaves_per_cluster=1, kernel="linear",
                 gamma="auto", degree=3, coef0=1.0, max_iter=300, tol=1e-9,
                 n_init=1, reseed_empty=False, random_state=None):
        self.n_clusters = n_clusters
        self.leaves_per_cluster = leaves_per_cluster
        self.kernel = kernel
        self.gamma = gamma
        self.degree = degree
        self.coef0 = coef0
        self.max_iter = max_iter
        self.tol = tol
        self.n_init = n_init
        self.reseed_empty = reseed_empty
        self.random_state = random_state

    def fit(self, X, y=None):
        X = as_float_matrix(X)
        _, gram = _resolve_kernel(X, self.kernel, self.gamma, self.degree, self.coef0)
        result = kmeans_then_tree(
            X, gram, self.n_clusters,
            leaves_per_cluster=self.leaves_per_cluster,
            seed=self.random_state, max_iter=self.max_iter, tol=self.tol,
            n_init=self.n_init, reseed_empty=self.reseed_empty,
        )
        self.tree_ = result.tree
        self.labels_ = result.labels
        self.kmeans_labels_ = result.kmeans_labels
        self.kmeans_score_ = result.kmeans_score
        self.n_nonempty_ = result.n_nonempty
        self.n_leaves_ = result.n_leaves
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "tree_")
        return tree_predict(self.tree_, X)
