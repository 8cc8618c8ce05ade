"""Closed-form objective gains for the candidate moves at one split.

A split of a leaf T (inside source cluster C) produces a left block L and a
right block R.  Each block can stay in C, move to a freshly created cluster,
or move to an existing cluster.  The legal combinations are:

- ``new_left`` / ``new_right``   one block moves to a new cluster
- ``new_pair``                   both blocks move to two new clusters
- ``move_left`` / ``move_right`` one block moves to an existing cluster
- ``move_pair``                  the blocks move to two distinct existing
                                 clusters (neither of them the source)

Every gain is the exact change of the partition objective (sum over clusters
of self-mass / size) and is computed in O(1) from a handful of kernel
masses, so a full threshold sweep never touches the kernel matrix itself.

Moves that would empty the source cluster are illegal: when both blocks
leave, the source must keep at least one sample outside the leaf.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    ClusterBudgetExceededError,
    DimensionMismatchError,
    EmptyClusterInUseError,
    IndexOutOfRangeError,
    SameClusterError,
    WouldEmptySourceClusterError,
)

TIE_TOL = 1e-12


@dataclass(frozen=True)
class ClusterState:
    """Sizes and self-masses of all clusters, plus the cluster budget."""

    sizes: np.ndarray  # (n_ids,) members per cluster id
    self_mass: np.ndarray  # (n_ids,) mass(C_k x C_k)
    max_clusters: int

    def __post_init__(self):
        object.__setattr__(self, "sizes", np.asarray(self.sizes, dtype=np.int64))
        object.__setattr__(self, "self_mass", np.asarray(self.self_mass, dtype=np.float64))
        if self.sizes.shape != self.self_mass.shape:
            raise DimensionMismatchError("sizes and self_mass must have equal length")

    @property
    def n_ids(self):
        return self.sizes.shape[0]

    @property
    def n_in_use(self):
        return int((self.sizes > 0).sum())


@dataclass
class SplitMasses:
    """Kernel masses describing one candidate split position of one leaf.

    ``leaf_cluster``, ``left_cluster`` and ``right_cluster`` hold the mass
    between the leaf (or block) and every cluster id, indexed like
    :class:`ClusterState`.
    """

    source: int  # cluster id the leaf currently belongs to
    leaf_size: int
    leaf_self: float
    leaf_cluster: np.ndarray
    left_size: int
    right_size: int
    left_self: float
    right_self: float
    left_cluster: np.ndarray
    right_cluster: np.ndarray


@dataclass(frozen=True)
class Move:
    """Outcome of :func:`best_move`: a gain plus the two block destinations.

    Destinations at or above the current number of cluster ids denote fresh
    clusters to allocate.  ``kind == "none"`` means no positive move exists.
    """

    gain: float
    kind: str
    left_cluster: int
    right_cluster: int


# ---------------------------------------------------------------------------
# raw formulas (array friendly, no guards)


def _new_cluster_gain(s_self, s_size, c_self, c_size, cross):
    # block S leaves cluster C for a fresh cluster; cross = mass(C x S)
    rem = c_size - s_size
    return (
        s_self * (1.0 / s_size + 1.0 / rem)
        + c_self * (1.0 / rem - 1.0 / c_size)
        - 2.0 * cross / rem
    )


def _transfer_gain(s_self, s_size, src_self, src_size, src_cross, tgt_self, tgt_size, tgt_cross):
    # block S moves from its source cluster into an existing target cluster
    rem = src_size - s_size
    grown = tgt_size + s_size
    return (
        s_self * (1.0 / grown + 1.0 / rem)
        - 2.0 * src_cross / rem
        + src_self * (1.0 / rem - 1.0 / src_size)
        + tgt_self * (1.0 / grown - 1.0 / tgt_size)
        + 2.0 * tgt_cross / grown
    )


def _pair_correction(c_self, c_size, t_self, t_size, t_cross, l_self, l_size, l_cross, r_self, r_size, r_cross):
    # two independent single-block transfer gains double-count the source
    # cluster's shrinkage; this term restores the exact two-block delta
    return (
        (c_self + t_self - 2.0 * t_cross) / (c_size - t_size)
        + c_self / c_size
        - (c_self + l_self - 2.0 * l_cross) / (c_size - l_size)
        - (c_self + r_self - 2.0 * r_cross) / (c_size - r_size)
    )


def _two_new_gain(split, c_self, c_size):
    # whole leaf to a fresh cluster, then the right block to a second one
    first = _new_cluster_gain(
        split.leaf_self, split.leaf_size, c_self, c_size, split.leaf_cluster[split.source]
    )
    lr_cross = (split.leaf_self - split.left_self - split.right_self) / 2.0
    second = _new_cluster_gain(
        split.right_self, split.right_size, split.leaf_self, split.leaf_size,
        lr_cross + split.right_self,
    )
    return first + second


# ---------------------------------------------------------------------------
# guarded public operations


def _side(split, side):
    if side == "left":
        return split.left_self, split.left_size, split.left_cluster
    if side == "right":
        return split.right_self, split.right_size, split.right_cluster
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _source_stats(split, stats):
    kp = split.source
    if not 0 <= kp < stats.n_ids:
        raise IndexOutOfRangeError(f"source cluster {kp} out of range")
    c_size = int(stats.sizes[kp])
    if c_size <= 0:
        raise EmptyClusterInUseError(f"source cluster {kp} is empty")
    return c_size, float(stats.self_mass[kp])


def gain_new_cluster(split, stats, side):
    """Gain of moving one block into a freshly created cluster."""
    c_size, c_self = _source_stats(split, stats)
    s_self, s_size, s_cluster = _side(split, side)
    if stats.n_in_use + 1 > stats.max_clusters:
        raise ClusterBudgetExceededError("no room for a new cluster")
    if c_size - s_size < 1:
        raise WouldEmptySourceClusterError("block is the whole source cluster")
    return float(_new_cluster_gain(s_self, s_size, c_self, c_size, s_cluster[split.source]))


def gain_two_new_clusters(split, stats):
    """Gain of sending left and right blocks to two fresh clusters."""
    c_size, c_self = _source_stats(split, stats)
    if stats.n_in_use + 2 > stats.max_clusters:
        raise ClusterBudgetExceededError("no room for two new clusters")
    if c_size - split.leaf_size < 1:
        raise WouldEmptySourceClusterError("leaf is the whole source cluster")
    return float(_two_new_gain(split, c_self, c_size))


def gain_transfer(split, stats, side, target):
    """Gain of moving one block into the existing cluster ``target``."""
    c_size, c_self = _source_stats(split, stats)
    s_self, s_size, s_cluster = _side(split, side)
    if not 0 <= target < stats.n_ids:
        raise IndexOutOfRangeError(f"target cluster {target} out of range")
    if target == split.source:
        raise SameClusterError("target equals the source cluster")
    if stats.sizes[target] <= 0:
        raise EmptyClusterInUseError(f"target cluster {target} is empty")
    if c_size - s_size < 1:
        raise WouldEmptySourceClusterError("block is the whole source cluster")
    return float(
        _transfer_gain(
            s_self, s_size, c_self, c_size, s_cluster[split.source],
            float(stats.self_mass[target]), int(stats.sizes[target]), s_cluster[target],
        )
    )


def transfer_correction(split, stats):
    """Correction that turns two one-block transfer gains into the exact
    gain of moving both blocks at once (independent of the targets)."""
    c_size, c_self = _source_stats(split, stats)
    if c_size - split.leaf_size < 1:
        raise WouldEmptySourceClusterError("leaf is the whole source cluster")
    kp = split.source
    return float(
        _pair_correction(
            c_self, c_size,
            split.leaf_self, split.leaf_size, split.leaf_cluster[kp],
            split.left_self, split.left_size, split.left_cluster[kp],
            split.right_self, split.right_size, split.right_cluster[kp],
        )
    )


def _transfer_targets(split, stats):
    ids = np.flatnonzero(stats.sizes > 0)
    return ids[ids != split.source]


def _top_two(gains):
    # indices of the two best entries; ties resolved toward lower index
    order = np.argsort(-np.asarray(gains), kind="stable")
    return int(order[0]), int(order[1])


def gain_double_transfer(split, stats):
    """Best gain of moving the blocks into two distinct existing clusters.

    Only the two best one-block transfers per side are combined; returns
    ``(gain, left_target, right_target)``.
    """
    c_size, c_self = _source_stats(split, stats)
    if c_size - split.leaf_size < 1:
        raise WouldEmptySourceClusterError("leaf is the whole source cluster")
    targets = _transfer_targets(split, stats)
    if targets.size < 2:
        raise EmptyClusterInUseError("needs two distinct non-empty target clusters")
    left_gains = [gain_transfer(split, stats, "left", int(t)) for t in targets]
    right_gains = [gain_transfer(split, stats, "right", int(t)) for t in targets]
    correction = transfer_correction(split, stats)

    l1, l2 = _top_two(left_gains)
    r1, r2 = _top_two(right_gains)
    if targets[l1] != targets[r1]:
        pick_l, pick_r = l1, r1
    elif left_gains[l1] + right_gains[r2] >= left_gains[l2] + right_gains[r1]:
        pick_l, pick_r = l1, r2
    else:
        pick_l, pick_r = l2, r1
    gain = left_gains[pick_l] + right_gains[pick_r] + correction
    return float(gain), int(targets[pick_l]), int(targets[pick_r])


def best_move(split, stats, tie_tol=TIE_TOL):
    """Best legal move for this split position.

    Candidates are scanned in a fixed preference order (transfers by
    ascending target with left before right, then single new cluster, then
    two new clusters, then the two-block transfer) and a later candidate
    only wins by exceeding the incumbent by ``tie_tol``.  Returns a no-op
    :class:`Move` when nothing has positive gain.
    """
    kp = split.source
    c_size, _ = _source_stats(split, stats)
    candidates = []

    for t in _transfer_targets(split, stats):
        t = int(t)
        candidates.append(
            (gain_transfer(split, stats, "left", t), "move_left", t, kp)
        )
        candidates.append(
            (gain_transfer(split, stats, "right", t), "move_right", kp, t)
        )

    fresh = stats.n_ids
    if stats.n_in_use + 1 <= stats.max_clusters:
        candidates.append((gain_new_cluster(split, stats, "left"), "new_left", fresh, kp))
        candidates.append((gain_new_cluster(split, stats, "right"), "new_right", kp, fresh))

    room_outside_leaf = c_size - split.leaf_size >= 1
    if stats.n_in_use + 2 <= stats.max_clusters and room_outside_leaf:
        candidates.append((gain_two_new_clusters(split, stats), "new_pair", fresh, fresh + 1))

    if room_outside_leaf and _transfer_targets(split, stats).size >= 2:
        gain, tl, tr = gain_double_transfer(split, stats)
        candidates.append((gain, "move_pair", tl, tr))

    best = None
    for cand in candidates:
        if best is None or cand[0] > best[0] + tie_tol:
            best = cand
    if best is None or best[0] <= 0.0:
        return Move(0.0, "none", kp, kp)
    return Move(float(best[0]), best[1], best[2], best[3])
