"""Exception and warning types raised by starweyl."""


class StarWeylError(Exception):
    """Base class for all library errors."""


class DimensionError(StarWeylError, ValueError):
    """Operands live in polynomial rings of different dimension."""


class OrderingMismatchError(StarWeylError, ValueError):
    """Two ordering keys are incompatible for the requested operation."""


class SingularPointError(StarWeylError, ArithmeticError):
    """The requested parameter lies on (or too close to) a singular point."""


class PoleError(StarWeylError, ArithmeticError):
    """An intertwiner denominator vanishes."""


class DivergesError(StarWeylError, ArithmeticError):
    """A product or limit does not exist."""


class DomainError(StarWeylError, ValueError):
    """A parameter is outside the domain where an integral converges."""


class ConvergenceError(StarWeylError, ArithmeticError):
    """A quadrature or series failed to reach the requested tolerance."""


class ContourTooCloseError(StarWeylError, ValueError):
    """A contour passes too close to a singular point."""


class TruncationError(StarWeylError, ValueError):
    """A Fock truncation is too small for the operator degree."""


class ConvergenceWarning(UserWarning):
    """A series is not expected to converge for the given parameters."""
