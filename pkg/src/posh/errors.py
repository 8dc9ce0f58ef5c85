"""Exception types shared across the package."""


class PoshError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(PoshError, ValueError):
    """Inputs disagree on ambient dimension or point count."""


class NonHermitianInput(PoshError, ValueError):
    """Coefficient data violates Hermitian symmetry beyond tolerance."""


class NotHermitian(PoshError, ValueError):
    """A matrix expected to be Hermitian is not, beyond tolerance."""


class ShapeMismatch(PoshError, ValueError):
    """A holomorphic representation has the wrong component counts."""


class CombinatorialBudgetExceeded(PoshError, RuntimeError):
    """An enumeration or product would exceed the configured size cap."""


class BadBracket(PoshError, ValueError):
    """Bisection bracket endpoints do not straddle the threshold."""


class DegenerateFamily(PoshError, RuntimeError):
    """Family or representation data is degenerate for the computation."""


class UnboundedThreshold(PoshError, RuntimeError):
    """The requested threshold is +infinity."""


class InconclusiveIndex(PoshError, RuntimeError):
    """k_max is too small to locate the stability index.

    Carries the per-class threshold table computed so far in ``table``.
    """

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table


class NonPositiveValue(PoshError, ValueError):
    """Logarithmic test requested at a point where the function is <= 0."""


class PolyFormatError(PoshError, ValueError):
    """Polynomial JSON is malformed (bad shape, NaN/Inf, bad types)."""


class NumericalResidueWarning(UserWarning):
    """A mathematically real quantity carried a large imaginary residue."""
