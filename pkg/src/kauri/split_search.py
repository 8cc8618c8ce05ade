"""Best threshold search for one (leaf, feature) pair.

The sweep orders the leaf's samples by feature value and walks the boundary
from left to right, maintaining the kernel masses of both blocks through
O(1) updates per step: moving sample t across the boundary shifts twice its
mass against the samples already on the left (plus its diagonal) into the
left block, and removes twice its mass against the samples still on the
right (plus its diagonal) from the right block.  Candidate moves are only
scored where consecutive sorted values actually differ, but the running
masses advance through every position so duplicates stay exact.

All positions are evaluated in one vectorized pass; the winning position is
then re-scored through :func:`kauri.gains.best_move` so tie handling is
identical to the scalar path.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import NoValidThresholdError
from .gains import (
    TIE_TOL,
    SplitMasses,
    _new_cluster_gain,
    _pair_correction,
    _transfer_gain,
    best_move,
)


@dataclass(frozen=True)
class SplitProposal:
    """A concrete split: threshold plus destination clusters of the blocks.

    ``order`` holds the leaf's samples sorted by feature value and
    ``position`` the block boundary: ``order[:position]`` goes left.
    """

    feature: int
    threshold: float
    position: int
    order: np.ndarray
    gain: float
    kind: str
    left_cluster: int
    right_cluster: int


def order_by_feature(column, samples):
    """Leaf samples sorted by feature value, ties by dataset index.

    ``samples`` must be ascending for the tie rule to hold; returns the
    reordered sample ids and their sorted values.
    """
    values = column[samples]
    order = np.argsort(values, kind="stable")
    return samples[order], values[order]


def boundary_masses(kernel, order, position):
    """Kernel mass between ``order[position]`` and the samples before/after.

    Returns ``(below, above)``; together with the diagonal entry they sum
    to the leaf-sample mass of that sample, which the sweep exploits.
    """
    t = order[position]
    below = float(kernel[t, order[:position]].sum())
    above = float(kernel[t, order[position + 1:]].sum())
    return below, above


def midpoint_threshold(low, high):
    """Midpoint between two consecutive distinct values, biased upward so
    `value < threshold` reproduces the block assignment exactly."""
    if not (low < high):
        raise NoValidThresholdError(f"no threshold separates {low} from {high}")
    mid = low + (high - low) / 2.0
    if not (low < mid):  # adjacent floats can round the midpoint down
        mid = high
    return float(mid)


def _prefix_masses(kernel, nu, chunk_elems=2**23):
    """below-mass of every position against its predecessors, chunked so
    temporaries stay bounded regardless of leaf size."""
    m = nu.size
    alpha = np.empty(m)
    chunk = max(1, chunk_elems // max(1, m))
    for r0 in range(0, m, chunk):
        r1 = min(r0 + chunk, m)
        block = kernel[np.ix_(nu[r0:r1], nu[:r1])]
        csum = np.cumsum(block, axis=1)
        cols = np.arange(r0, r1) - 1
        take = np.take_along_axis(csum, np.maximum(cols, 0)[:, None], axis=1)[:, 0]
        alpha[r0:r1] = np.where(cols >= 0, take, 0.0)
    return alpha


def _pair_row(left_mat, right_mat):
    """Per-position max of left + right over distinct target rows."""
    order_l = np.argsort(-left_mat, axis=0, kind="stable")
    order_r = np.argsort(-right_mat, axis=0, kind="stable")

    def val(mat, idx):
        return np.take_along_axis(mat, idx[None, :], axis=0)[0]

    l1, l2 = order_l[0], order_l[1]
    r1, r2 = order_r[0], order_r[1]
    top = val(left_mat, l1) + val(right_mat, r1)
    alt = np.maximum(
        val(left_mat, l1) + val(right_mat, r2),
        val(left_mat, l2) + val(right_mat, r1),
    )
    return np.where(l1 != r1, top, alt)


def find_best_split(kernel, column, feature, samples, cache, leaf_row, source, stats,
                    *, min_leaf_size=1, tie_tol=TIE_TOL):
    """Best positive-gain split of one leaf along one feature.

    ``column`` is the full feature column, ``samples`` the leaf's member
    indices (ascending), ``leaf_row`` the leaf's row in ``cache``.  Returns
    a :class:`SplitProposal` or None when no positive move exists.
    """
    m = int(samples.size)
    if m < 2 or m < 2 * min_leaf_size:
        return None
    nu, svals = order_by_feature(column, samples)

    valid = svals[1:] > svals[:-1]
    if min_leaf_size > 1:
        n_left = np.arange(1, m)
        valid &= (n_left >= min_leaf_size) & (m - n_left >= min_leaf_size)
    if not valid.any():
        return None

    diag = kernel[nu, nu]
    lam = cache.leaf_sample[leaf_row, nu]
    alpha = _prefix_masses(kernel, nu)
    gain_in = 2.0 * alpha + diag  # entering the left block
    gain_out = 2.0 * (lam - alpha - diag) + diag  # leaving the right block
    left_self = np.cumsum(gain_in)[: m - 1]
    leaf_self = float(lam.sum())
    right_self = leaf_self - np.cumsum(gain_out)[: m - 1]

    omega = cache.cluster_sample[:, nu]
    left_cross = np.cumsum(omega, axis=1)[:, : m - 1]
    leaf_cross = omega.sum(axis=1)
    right_cross = leaf_cross[:, None] - left_cross

    n_left = np.arange(1, m)
    n_right = m - n_left
    kp = int(source)
    c_size = int(stats.sizes[kp])
    c_self = float(stats.self_mass[kp])

    best = np.full(m - 1, -np.inf)
    targets = np.flatnonzero(stats.sizes > 0)
    targets = targets[targets != kp]
    left_rows, right_rows = [], []
    for t in targets:
        t = int(t)
        row_l = _transfer_gain(
            left_self, n_left, c_self, c_size, left_cross[kp],
            float(stats.self_mass[t]), int(stats.sizes[t]), left_cross[t],
        )
        row_r = _transfer_gain(
            right_self, n_right, c_self, c_size, right_cross[kp],
            float(stats.self_mass[t]), int(stats.sizes[t]), right_cross[t],
        )
        left_rows.append(row_l)
        right_rows.append(row_r)
        np.maximum(best, row_l, out=best)
        np.maximum(best, row_r, out=best)

    if stats.n_in_use + 1 <= stats.max_clusters:
        np.maximum(best, _new_cluster_gain(left_self, n_left, c_self, c_size, left_cross[kp]), out=best)
        np.maximum(best, _new_cluster_gain(right_self, n_right, c_self, c_size, right_cross[kp]), out=best)

    room_outside_leaf = c_size - m >= 1
    if stats.n_in_use + 2 <= stats.max_clusters and room_outside_leaf:
        first = _new_cluster_gain(leaf_self, m, c_self, c_size, float(leaf_cross[kp]))
        lr_cross = (leaf_self - left_self - right_self) / 2.0
        second = _new_cluster_gain(right_self, n_right, leaf_self, m, lr_cross + right_self)
        np.maximum(best, first + second, out=best)

    if room_outside_leaf and targets.size >= 2:
        correction = _pair_correction(
            c_self, c_size,
            leaf_self, m, float(leaf_cross[kp]),
            left_self, n_left, left_cross[kp],
            right_self, n_right, right_cross[kp],
        )
        pair = _pair_row(np.vstack(left_rows), np.vstack(right_rows)) + correction
        np.maximum(best, pair, out=best)

    best[~valid] = -np.inf
    idx = int(np.argmax(best))
    if not best[idx] > 0.0:
        return None

    position = idx + 1
    split = SplitMasses(
        source=kp,
        leaf_size=m,
        leaf_self=leaf_self,
        leaf_cluster=leaf_cross,
        left_size=position,
        right_size=m - position,
        left_self=float(left_self[idx]),
        right_self=float(right_self[idx]),
        left_cluster=left_cross[:, idx].copy(),
        right_cluster=right_cross[:, idx].copy(),
    )
    move = best_move(split, stats, tie_tol=tie_tol)
    if move.kind == "none":
        return None
    threshold = midpoint_threshold(float(svals[idx]), float(svals[position]))
    return SplitProposal(
        feature=int(feature),
        threshold=threshold,
        position=position,
        order=nu,
        gain=move.gain,
        kind=move.kind,
        left_cluster=move.left_cluster,
        right_cluster=move.right_cluster,
    )
