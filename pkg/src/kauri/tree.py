"""Binary axis-aligned trees grown by greedy objective maximisation.

Training repeatedly scores every (leaf, feature) pair with the vectorized
threshold sweep, applies the single best positive move in the whole tree,
and rebuilds the mass caches from scratch.  A split may create up to two
new clusters or move blocks into existing ones, so the number of leaves and
the number of clusters evolve independently (bounded by ``max_leaves`` and
``max_clusters``).  Routing is always `feature value < threshold` goes left.

Cluster ids are allocated densely in creation order and clusters can never
be emptied (moves that would do so are illegal), so final labels are always
0..n_clusters-1.  Leaf ids are assigned in creation order, root first.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, DimensionMismatchError, SchemaViolationError
from .gains import ClusterState
from .masses import Partition, kmeans_score, partition_objective, recompute_masses
from .split_search import find_best_split
from .validation import as_float_matrix, as_square_matrix


@dataclass
class Node:
    """Internal node (children set) or leaf (leaf_id/cluster set)."""

    feature: int = -1
    threshold: float = 0.0
    left: "Node | None" = None
    right: "Node | None" = None
    leaf_id: int = -1
    cluster: int = -1

    @property
    def is_leaf(self):
        return self.left is None


@dataclass
class Tree:
    root: Node
    n_features: int


@dataclass(frozen=True)
class GrowConfig:
    """Training budget and stopping knobs."""

    max_clusters: int
    max_leaves: int | None = None  # None: as many as samples
    max_features: int | None = None  # None: all features; else first k columns
    min_leaf_size: int = 1
    gain_tolerance: float = 0.0

    def __post_init__(self):
        if self.max_clusters < 1:
            raise ConfigError("max_clusters must be >= 1")
        if self.max_leaves is not None and self.max_leaves < 1:
            raise ConfigError("max_leaves must be >= 1")
        if self.max_features is not None and self.max_features < 1:
            raise ConfigError("max_features must be >= 1")
        if self.min_leaf_size < 1:
            raise ConfigError("min_leaf_size must be >= 1")
        if self.gain_tolerance < 0:
            raise ConfigError("gain_tolerance must be >= 0")


@dataclass(frozen=True)
class Step:
    """One applied split, with the objective value before it."""

    leaf: int
    feature: int
    threshold: float
    kind: str
    gain: float
    objective_before: float


@dataclass
class GrowResult:
    tree: Tree
    labels: np.ndarray
    leaf_of_sample: np.ndarray
    n_leaves: int
    n_clusters: int
    objective: float
    score: float
    steps: list = field(default_factory=list)
    converged: bool = True  # False when a budget stopped growth instead


def grow_tree(data, kernel, config):
    """Grow a clustering tree on ``data`` with Gram matrix ``kernel``."""
    x = as_float_matrix(data)
    k = as_square_matrix(kernel)
    n, d = x.shape
    if k.shape[0] != n:
        raise DimensionMismatchError(f"kernel is {k.shape[0]}x{k.shape[0]}, data has {n} rows")

    max_leaves = n if config.max_leaves is None else min(config.max_leaves, n)
    d_used = d if config.max_features is None else min(d, config.max_features)
    min_explorable = max(2, 2 * config.min_leaf_size)

    root = Node(leaf_id=0, cluster=0)
    members = {0: np.arange(n)}
    cluster_of_leaf = {0: 0}
    node_of_leaf = {0: root}
    leaf_of_sample = np.zeros(n, dtype=np.int64)
    next_leaf = 1
    n_cluster_ids = 1
    explorable = {0} if n >= min_explorable else set()
    steps = []
    converged = True

    while explorable:
        if len(members) >= max_leaves:
            converged = False
            break
        active = np.array(sorted(members), dtype=np.int64)
        row_of = {int(leaf): i for i, leaf in enumerate(active)}
        part = Partition(
            np.searchsorted(active, leaf_of_sample),
            np.array([cluster_of_leaf[int(l)] for l in active], dtype=np.int64),
        )
        cache = recompute_masses(k, part, n_clusters=n_cluster_ids)
        stats = ClusterState(cache.cluster_sizes, cache.cluster_self.copy(), config.max_clusters)
        objective_before = partition_objective(cache)

        best = None
        best_leaf = -1
        for leaf in sorted(explorable):
            row = row_of[leaf]
            source = cluster_of_leaf[leaf]
            samples = members[leaf]
            for f in range(d_used):
                prop = find_best_split(
                    k, x[:, f], f, samples, cache, row, source, stats,
                    min_leaf_size=config.min_leaf_size,
                )
                # strict comparison: earliest (leaf, feature) wins exact ties
                if prop is not None and (best is None or prop.gain > best.gain):
                    best, best_leaf = prop, leaf

        if best is None or not (best.gain > config.gain_tolerance):
            break

        steps.append(Step(best_leaf, best.feature, best.threshold, best.kind,
                          best.gain, objective_before))
        samples = members.pop(best_leaf)
        left = np.sort(best.order[: best.position])
        right = np.sort(best.order[best.position:])
        left_id, right_id = next_leaf, next_leaf + 1
        next_leaf += 2
        members[left_id] = left
        members[right_id] = right
        leaf_of_sample[left] = left_id
        leaf_of_sample[right] = right_id
        n_cluster_ids = max(n_cluster_ids, best.left_cluster + 1, best.right_cluster + 1)
        del cluster_of_leaf[best_leaf]
        cluster_of_leaf[left_id] = best.left_cluster
        cluster_of_leaf[right_id] = best.right_cluster

        node = node_of_leaf.pop(best_leaf)
        node.feature = best.feature
        node.threshold = best.threshold
        node.left = Node(leaf_id=left_id, cluster=best.left_cluster)
        node.right = Node(leaf_id=right_id, cluster=best.right_cluster)
        node.leaf_id = -1
        node.cluster = -1
        node_of_leaf[left_id] = node.left
        node_of_leaf[right_id] = node.right

        explorable.discard(best_leaf)
        if left.size >= min_explorable:
            explorable.add(left_id)
        if right.size >= min_explorable:
            explorable.add(right_id)

    active = np.array(sorted(members), dtype=np.int64)
    part = Partition(
        np.searchsorted(active, leaf_of_sample),
        np.array([cluster_of_leaf[int(l)] for l in active], dtype=np.int64),
    )
    cache = recompute_masses(k, part, n_clusters=n_cluster_ids)
    objective = partition_objective(cache)
    labels = np.array([cluster_of_leaf[int(l)] for l in leaf_of_sample], dtype=np.int64)
    return GrowResult(
        tree=Tree(root=root, n_features=d),
        labels=labels,
        leaf_of_sample=leaf_of_sample.copy(),
        n_leaves=len(members),
        n_clusters=n_cluster_ids,
        objective=objective,
        score=kmeans_score(k, cache),
        steps=steps,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# routing


def assign_leaves(tree, data):
    """Leaf id reached by every row of ``data``."""
    x = as_float_matrix(data)
    if x.shape[1] != tree.n_features:
        raise DimensionMismatchError(
            f"tree expects {tree.n_features} features, data has {x.shape[1]}"
        )
    out = np.empty(x.shape[0], dtype=np.int64)
    stack = [(tree.root, np.arange(x.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if node.is_leaf:
            out[idx] = node.leaf_id
            continue
        goes_left = x[idx, node.feature] < node.threshold
        stack.append((node.left, idx[goes_left]))
        stack.append((node.right, idx[~goes_left]))
    return out


def predict(tree, data):
    """Cluster label reached by every row of ``data``."""
    leaf_ids = assign_leaves(tree, data)
    info = leaf_info(tree)
    cluster_of_leaf = {lid: rec["cluster"] for lid, rec in info.items()}
    return np.array([cluster_of_leaf[int(l)] for l in leaf_ids], dtype=np.int64)


def leaf_info(tree):
    """Depth (in nodes, root = 1), path conditions and cluster per leaf.

    Conditions are (feature, went_left) pairs from root to leaf.
    """
    info = {}
    stack = [(tree.root, 1, ())]
    while stack:
        node, depth, conds = stack.pop()
        if node.is_leaf:
            info[node.leaf_id] = {"depth": depth, "conditions": conds, "cluster": node.cluster}
        else:
            stack.append((node.left, depth + 1, conds + ((node.feature, True),)))
            stack.append((node.right, depth + 1, conds + ((node.feature, False),)))
    return info


def count_leaves(tree):
    return sum(1 for node in iter_nodes(tree) if node.is_leaf)


def iter_nodes(tree):
    """All nodes in preorder, iteratively (trees can be deep)."""
    stack = [tree.root]
    while stack:
        node = stack.pop()
        yield node
        if not node.is_leaf:
            stack.append(node.right)
            stack.append(node.left)


# ---------------------------------------------------------------------------
# serialization


def tree_to_json(tree):
    """Serialize to the versioned JSON layout, thresholds at 17 significant
    digits so export -> import -> export is byte-identical."""
    parts = []
    _write_node(tree.root, parts)
    body = "".join(parts)
    return f'{{"version": 1, "n_features": {int(tree.n_features)}, "root": {body}}}'


def _write_node(root, parts):
    # explicit stack; marker strings splice children around the parent text
    stack = [root]
    while stack:
        node = stack.pop()
        if isinstance(node, str):
            parts.append(node)
            continue
        if node.is_leaf:
            parts.append(
                f'{{"type": "leaf", "leaf_id": {int(node.leaf_id)}, "cluster": {int(node.cluster)}}}'
            )
            continue
        parts.append(
            f'{{"type": "internal", "feature": {int(node.feature)}, '
            f'"threshold": {format(float(node.threshold), ".17g")}, "left": '
        )
        stack.append("}")
        stack.append(node.right)
        stack.append(', "right": ')
        stack.append(node.left)


def tree_from_json(text):
    """Parse a serialized tree, validating the schema strictly."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolationError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != 1:
        raise SchemaViolationError("expected an object with version 1")
    n_features = doc.get("n_features")
    if not isinstance(n_features, int) or n_features < 1:
        raise SchemaViolationError("n_features must be a positive integer")
    if "root" not in doc:
        raise SchemaViolationError("missing root node")

    root = Node()
    seen_leaf_ids = set()
    stack = [(doc["root"], root)]
    while stack:
        spec, node = stack.pop()
        if not isinstance(spec, dict):
            raise SchemaViolationError("tree nodes must be objects")
        kind = spec.get("type")
        if kind == "leaf":
            if set(spec) != {"type", "leaf_id", "cluster"}:
                raise SchemaViolationError(f"bad leaf keys: {sorted(spec)}")
            leaf_id, cluster = spec["leaf_id"], spec["cluster"]
            if not isinstance(leaf_id, int) or leaf_id < 0:
                raise SchemaViolationError("leaf_id must be a non-negative integer")
            if not isinstance(cluster, int) or cluster < 0:
                raise SchemaViolationError("cluster must be a non-negative integer")
            if leaf_id in seen_leaf_ids:
                raise SchemaViolationError(f"duplicate leaf_id {leaf_id}")
            seen_leaf_ids.add(leaf_id)
            node.leaf_id, node.cluster = leaf_id, cluster
        elif kind == "internal":
            if set(spec) != {"type", "feature", "threshold", "left", "right"}:
                raise SchemaViolationError(f"bad internal keys: {sorted(spec)}")
            feature, threshold = spec["feature"], spec["threshold"]
            if not isinstance(feature, int) or not 0 <= feature < n_features:
                raise SchemaViolationError(f"feature {feature} outside [0, {n_features})")
            if not isinstance(threshold, (int, float)) or not np.isfinite(threshold):
                raise SchemaViolationError("threshold must be a finite number")
            node.feature = int(feature)
            node.threshold = float(threshold)
            node.left, node.right = Node(), Node()
            stack.append((spec["left"], node.left))
            stack.append((spec["right"], node.right))
        else:
            raise SchemaViolationError(f"unknown node type {kind!r}")
    return Tree(root=root, n_features=n_features)


def tree_to_dot(tree):
    """Graphviz source with one box per node, preorder numbering."""
    lines = ["digraph tree {", "  node [shape=box];"]
    edges = []
    counter = 0
    stack = [(tree.root, -1)]
    # preorder via explicit stack; parent index travels with the node
    while stack:
        node, parent = stack.pop()
        idx = counter
        counter += 1
        if node.is_leaf:
            label = f"leaf {node.leaf_id} → cluster {node.cluster}"
        else:
            label = f"f{node.feature} < {node.threshold!r}"
        lines.append(f'  n{idx} [label="{label}"];')
        if parent >= 0:
            edges.append(f"  n{parent} -> n{idx};")
        if not node.is_leaf:
            stack.append((node.right, idx))
            stack.append((node.left, idx))
    return "\n".join(lines + edges + ["}"]) + "\n"
