"""Exception types raised across the package.

Everything derives from :class:`KauriError`, which itself derives from
``ValueError`` so that generic callers catching ``ValueError`` keep working.
"""


class KauriError(ValueError):
    """Base class for all errors raised by this package."""


class NonFiniteInputError(KauriError):
    """Input contains NaN or infinite values."""


class NegativeChi2InputError(KauriError):
    """Chi-squared kernels require non-negative features."""


class NonPositiveGammaError(KauriError):
    """Kernel bandwidth must be strictly positive."""


class ConfigError(KauriError):
    """A configuration value is out of its legal range."""


class DimensionMismatchError(KauriError):
    """Array shapes are inconsistent with each other."""


class IndexOutOfRangeError(KauriError):
    """A sample, leaf or cluster index is outside its valid range."""


class EmptyClusterInUseError(KauriError):
    """A move references a cluster that has no members."""


class WouldEmptySourceClusterError(KauriError):
    """A move would leave its source cluster without members."""


class ClusterBudgetExceededError(KauriError):
    """A move would allocate more clusters than the configured maximum."""


class SameClusterError(KauriError):
    """Source and destination cluster of a transfer are identical."""


class NoValidThresholdError(KauriError):
    """No threshold separates the two sides (feature values coincide)."""


class SchemaViolationError(KauriError):
    """A serialized tree or a column schema does not match its contract."""


class ParseError(KauriError):
    """A CSV cell could not be interpreted under its declared column kind."""


class EmptyAfterDroppingError(KauriError):
    """Every row was dropped while handling missing values."""


class KTooLargeError(KauriError):
    """More clusters requested than there are samples."""


class LengthMismatchError(KauriError):
    """Two label vectors differ in length."""


class NonPositiveReferenceError(KauriError):
    """Score normalization needs a strictly positive reference."""


class DegenerateLabelingsWarning(UserWarning):
    """Both labelings are single-cluster; the index is 1 by convention."""
