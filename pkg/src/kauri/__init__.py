"""Unsupervised binary decision trees driven by a kernel k-means objective.

The tree is the clustering: every leaf belongs to a cluster and each split
is chosen in closed form to maximally increase the partition objective, so
training never materialises centroids and prediction is plain tree routing.
"""

from .baselines import (
    KernelKMeansResult,
    KMeansTreeResult,
    count_nonempty,
    gini_tree,
    kernel_kmeans,
    kmeans_then_tree,
)
from .estimators import GiniTreeClassifier, KauriTree, KernelKMeans, KMeansTree
from .exceptions import KauriError
from .gains import ClusterState, Move, SplitMasses, best_move
from .kernels import KERNEL_NAMES, KernelSpec, compute_kernel, resolve_gamma, validate_kernel
from .masses import (
    MassCache,
    Partition,
    kernel_mass,
    kmeans_score,
    objective_from_labels,
    partition_objective,
    recompute_masses,
)
from .metrics import (
    adjusted_rand_index,
    contingency_table,
    normalized_score,
    unsupervised_accuracy,
    weighted_average_depth,
    weighted_average_explanation_size,
)
from .split_search import SplitProposal, find_best_split
from .tree import (
    GrowConfig,
    GrowResult,
    Tree,
    assign_leaves,
    count_leaves,
    grow_tree,
    predict,
    tree_from_json,
    tree_to_dot,
    tree_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterState",
    "GiniTreeClassifier",
    "GrowConfig",
    "GrowResult",
    "KERNEL_NAMES",
    "KauriError",
    "KauriTree",
    "KernelKMeans",
    "KernelKMeansResult",
    "KernelSpec",
    "KMeansTree",
    "KMeansTreeResult",
    "MassCache",
    "Move",
    "Partition",
    "SplitMasses",
    "SplitProposal",
    "Tree",
    "__version__",
    "adjusted_rand_index",
    "assign_leaves",
    "best_move",
    "compute_kernel",
    "contingency_table",
    "count_leaves",
    "count_nonempty",
    "find_best_split",
    "gini_tree",
    "grow_tree",
    "kernel_kmeans",
    "kernel_mass",
    "kmeans_score",
    "kmeans_then_tree",
    "normalized_score",
    "objective_from_labels",
    "partition_objective",
    "predict",
    "recompute_masses",
    "resolve_gamma",
    "tree_from_json",
    "tree_to_dot",
    "tree_to_json",
    "unsupervised_accuracy",
    "validate_kernel",
    "weighted_average_depth",
    "weighted_average_explanation_size",
]
