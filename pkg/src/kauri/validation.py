"""Small input-validation helpers shared by the public entry points."""

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    NonFiniteInputError,
)


def as_float_matrix(x, name="data"):
    """Return ``x`` as a C-contiguous float64 matrix of shape (n, d).

    Rejects empty and non-finite inputs.
    """
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatchError(f"{name} must have at least one row and one column")
    if not np.isfinite(arr).all():
        raise NonFiniteInputError(f"{name} contains NaN or infinite entries")
    return arr


def as_square_matrix(x, name="kernel"):
    """Return ``x`` as a float64 square matrix, rejecting non-finite entries."""
    arr = as_float_matrix(x, name=name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {arr.shape}")
    return arr


def as_index_array(idx, upper, name="indices"):
    """Return ``idx`` as a 1-d int64 array with every value in [0, upper)."""
    arr = np.asarray(idx, dtype=np.int64)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-dimensional")
    if arr.size and (arr.min() < 0 or arr.max() >= upper):
        raise IndexOutOfRangeError(f"{name} must lie in [0, {upper})")
    return arr


def as_labels(y, n=None, name="labels"):
    """Return ``y`` as a 1-d int64 label vector, optionally checking length."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-dimensional")
    arr = arr.astype(np.int64, copy=False)
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatchError(f"{name} has length {arr.shape[0]}, expected {n}")
    return arr
