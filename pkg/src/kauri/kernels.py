"""Pairwise kernel matrices.

Six kernels are supported, all returning dense symmetric float64 Gram
matrices:

- ``linear``          k(x, y) = <x, y>
- ``rbf``             k(x, y) = exp(-gamma * ||x - y||^2)
- ``laplacian``       k(x, y) = exp(-gamma * ||x - y||_1)
- ``chi2``            k(x, y) = exp(-gamma * sum_f (x_f - y_f)^2 / (x_f + y_f))
- ``additive_chi2``   k(x, y) = sum_f 2 * x_f * y_f / (x_f + y_f)
- ``polynomial``      k(x, y) = (gamma * <x, y> + coef0)^degree

Both chi-squared kernels require non-negative features and treat 0/0
contributions as 0.  ``gamma="auto"`` resolves to 1/n_features except for
``chi2`` where it resolves to 1.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import (
    ConfigError,
    NegativeChi2InputError,
    NonFiniteInputError,
    NonPositiveGammaError,
)
from .validation import as_float_matrix, as_square_matrix

KERNEL_NAMES = ("linear", "rbf", "laplacian", "chi2", "additive_chi2", "polynomial")

# kernels whose "auto" bandwidth is 1 / n_features
_INVERSE_DIM_GAMMA = ("rbf", "laplacian", "polynomial")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice plus hyperparameters.

    gamma may be the string "auto" or a strictly positive float; degree and
    coef0 only matter for the polynomial kernel.
    """

    name: str = "linear"
    gamma: float | str = "auto"
    degree: int = 3
    coef0: float = 1.0

    def __post_init__(self):
        if self.name not in KERNEL_NAMES:
            raise ConfigError(f"unknown kernel {self.name!r}, expected one of {KERNEL_NAMES}")
        if isinstance(self.gamma, str):
            if self.gamma != "auto":
                raise ConfigError(f"gamma must be a positive float or 'auto', got {self.gamma!r}")
        elif not (float(self.gamma) > 0):
            raise NonPositiveGammaError(f"gamma must be > 0, got {self.gamma}")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ConfigError(f"degree must be a positive integer, got {self.degree}")


def resolve_gamma(spec, n_features):
    """Concrete bandwidth for ``spec`` on data with ``n_features`` columns."""
    if not isinstance(spec.gamma, str):
        return float(spec.gamma)
    if spec.name in _INVERSE_DIM_GAMMA:
        return 1.0 / n_features
    return 1.0  # chi2 default; linear/additive_chi2 never use it


def compute_kernel(data, spec):
    """Dense Gram matrix of ``data`` (n, d) under ``spec``.

    The result is symmetrized to kill round-off asymmetry, so downstream
    code can rely on k[i, j] == k[j, i] exactly.
    """
    x = as_float_matrix(data)
    gamma = resolve_gamma(spec, x.shape[1])

    if spec.name == "linear":
        k = x @ x.T
    elif spec.name == "rbf":
        sq_norms = np.einsum("ij,ij->i", x, x)
        sq = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (x @ x.T)
        np.maximum(sq, 0.0, out=sq)  # kill round-off negatives
        k = np.exp(-gamma * sq)
    elif spec.name == "laplacian":
        k = np.exp(-gamma * cdist(x, x, "cityblock"))
    elif spec.name == "chi2":
        k = np.exp(-gamma * _chi2_statistic(x))
    elif spec.name == "additive_chi2":
        k = _additive_chi2(x)
    elif spec.name == "polynomial":
        k = (gamma * (x @ x.T) + spec.coef0) ** spec.degree
    else:  # pragma: no cover - guarded by KernelSpec
        raise ConfigError(spec.name)

    k = np.asarray(k, dtype=np.float64)
    k = (k + k.T) / 2.0
    return np.ascontiguousarray(k)


def _check_chi2_input(x):
    if (x < 0).any():
        raise NegativeChi2InputError("chi-squared kernels require non-negative features")


def _row_chunks(n, d):
    # keep temporaries around ~128 MB: chunk * n * d doubles
    chunk = max(1, int(2**24 / max(1, n * d)))
    for start in range(0, n, chunk):
        yield start, min(start + chunk, n)


def _chi2_statistic(x):
    """Matrix of sum_f (x_f - y_f)^2 / (x_f + y_f), 0/0 counted as 0."""
    _check_chi2_input(x)
    n, d = x.shape
    out = np.empty((n, n))
    for lo, hi in _row_chunks(n, d):
        diff = x[lo:hi, None, :] - x[None, :, :]
        denom = x[lo:hi, None, :] + x[None, :, :]
        np.square(diff, out=diff)
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = diff / denom
        frac[denom == 0] = 0.0
        out[lo:hi] = frac.sum(axis=2)
    return out


def _additive_chi2(x):
    """Matrix of sum_f 2 * x_f * y_f / (x_f + y_f), 0/0 counted as 0."""
    _check_chi2_input(x)
    n, d = x.shape
    out = np.empty((n, n))
    for lo, hi in _row_chunks(n, d):
        prod = 2.0 * x[lo:hi, None, :] * x[None, :, :]
        denom = x[lo:hi, None, :] + x[None, :, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = prod / denom
        frac[denom == 0] = 0.0
        out[lo:hi] = frac.sum(axis=2)
    return out


def validate_kernel(matrix, tol=1e-8):
    """Check that ``matrix`` is a usable Gram matrix and return it as float64.

    Requires a square, finite matrix, symmetric within ``tol``.
    """
    k = as_square_matrix(matrix)
    if not np.isfinite(k).all():
        raise NonFiniteInputError("kernel matrix contains NaN or infinite entries")
    err = np.abs(k - k.T).max() if k.size else 0.0
    if err > tol:
        raise ConfigError(f"kernel matrix is not symmetric (max asymmetry {err:.3g})")
    return k
