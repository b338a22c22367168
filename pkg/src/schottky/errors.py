"""Exception hierarchy shared by every module of the package."""


class SchottkyError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVector(SchottkyError, ValueError):
    pass


class DimensionMismatch(SchottkyError, ValueError):
    pass


class EmptyInput(SchottkyError, ValueError):
    pass


class Singular(SchottkyError, ValueError):
    pass


class IllConditioned(SchottkyError, ArithmeticError):
    """Eigenvalue moduli cannot be split into well separated classes."""


class FiniteOrder(SchottkyError, ValueError):
    """The projective map is periodic, so its limit set is undefined."""

    def __init__(self, order, message=None):
        self.order = order
        super().__init__(message or f"map has finite order {order}")


class NonUnitarySpectrum(SchottkyError, ValueError):
    pass


class SpectralRadiusViolation(SchottkyError, ValueError):
    pass


class BadDimension(SchottkyError, ValueError):
    pass


class SubspacesNotDisjoint(SchottkyError, ValueError):
    pass


class AlphaOutOfRange(SchottkyError, ValueError):
    pass


class NotReduced(SchottkyError, ValueError):
    pass


class PointNotInDomain(SchottkyError, ValueError):
    pass


class ParseError(SchottkyError, ValueError):
    """Input file does not match the expected JSON schema."""
