"""Exception types shared across the package."""


class GrassvolError(ValueError):
    """Base class for all argument/shape/domain errors raised here."""


class DimensionMismatch(GrassvolError):
    """Matrix or subspace shapes are incompatible for the requested operation."""


class RankDeficient(GrassvolError):
    """A matrix required to have full column rank does not, numerically."""


class NotDisjoint(GrassvolError):
    """Two subspaces share a nonzero vector (juxtaposed basis is rank deficient)."""


class ZeroColumn(GrassvolError):
    """A matrix column has zero norm and cannot be normalized."""


class BadShape(GrassvolError):
    """Integer size parameters violate the operation's shape constraints."""


class BadAngles(GrassvolError):
    """A principal-angle prescription falls outside (0, pi/2]."""


class DomainError(GrassvolError):
    """A scalar argument is outside the mathematical domain of the function."""


class EmptyRecords(GrassvolError):
    """A summary was requested over an empty record sequence."""


class MatrixFormatError(GrassvolError):
    """A matrix file could not be parsed (bad CSV/JSON structure or values)."""
