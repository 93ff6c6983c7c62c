"""Exception types raised across the package."""


class DimensionMismatchError(ValueError):
    """Vectors or matrices of incompatible sizes were combined."""


class SkewFormError(ValueError):
    """A Gram matrix is not skew-symmetric with zero diagonal."""


class NotUnimodularError(ValueError):
    """A set of vectors does not span a direct summand of the ambient lattice."""


class BoundaryTrivialError(ValueError):
    """The boundary group of a form is zero, so no boundary element can be chosen."""


class ResourceLimitError(RuntimeError):
    """A configured vertex, simplex, nonzero or monomial cap was exceeded."""


class TruncationOverflowError(ResourceLimitError):
    """Too many monomials in a bidegree window."""


class InjectivityError(ArithmeticError):
    """Quotienting a series produced a negative dimension."""


class UnsupportedCoefficientsError(ValueError):
    """No stability clause exists for the requested coefficient ring."""


class OutOfRangeError(ValueError):
    """A dimension parameter lies outside the range a statement covers."""


class FlavorMismatchError(ValueError):
    """Grading indices from different monoids were added."""
