"""Exception types shared across the package."""


class F2RegError(Exception):
    """Base class for all library errors."""


class SingularMatrix(F2RegError):
    """A matrix that was required to be invertible is rank-deficient."""


class DimensionMismatch(F2RegError):
    """Operands disagree on n or on a required dimension count."""


class MapDoesNotCarryBasis(F2RegError):
    """The supplied map does not carry the subspace onto the required coordinate span."""


class CapExceeded(F2RegError):
    """An exhaustive enumeration was requested beyond the configured cap."""


class DyadicOverflow(F2RegError):
    """Exact dyadic arithmetic exceeded the configured numerator capacity."""


class DegreeTooHigh(F2RegError):
    """A spectrum carries mass above the stated degree level."""


class SupportMismatch(F2RegError):
    """A fixing vector is not supported on the set of fixed coordinates."""


class NotAComplement(F2RegError):
    """The supplied subspace is not a direct-sum complement of the orthogonal space."""


class ZeroGamma(F2RegError):
    """A nonzero parity vector was required."""


class NoCollisionWithinBudget(F2RegError):
    """The bucket search exhausted its subset budget without a collision."""


class DegreeMismatch(F2RegError):
    """The function's Fourier degree exceeds the stated bound."""


class PreconditionViolated(F2RegError):
    """An operation-specific precondition failed."""


class InconsistentConstraints(F2RegError):
    """An affine constraint system has no solution."""


class EvenN(F2RegError):
    """Majority-family operations need an odd number of variables."""
