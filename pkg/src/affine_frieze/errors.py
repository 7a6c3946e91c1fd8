"""Exception hierarchy shared by every module of the package."""


class FriezeError(Exception):
    """Base class for all errors raised by :mod:`affine_frieze`."""


class InvalidQuiverError(FriezeError, ValueError):
    """Bad type selector or parameters (q > p, n < 4, unknown E index...)."""


class NotAffineError(FriezeError):
    """Raised when lattice data does not look like an affine quiver."""


class NotDivisible(FriezeError, ArithmeticError):
    """An exact division had a nonzero remainder."""


class InsufficientDepth(FriezeError, ValueError):
    """A computation needs more frieze rows than are available."""


class NotAdjacent(FriezeError, ValueError):
    pass


class InvalidPath(FriezeError, ValueError):
    pass


class CalibrationFailed(FriezeError):
    pass


class ResourceLimitExceeded(FriezeError):
    """A symbolic frieze term grew beyond the configured term budget."""

    def __init__(self, row, vertex, terms, limit):
        self.row = row
        self.vertex = vertex
        self.terms = terms
        self.limit = limit
        super().__init__(
            f"row {row}, vertex {vertex}: {terms} terms exceeds budget of {limit}"
        )


class UnknownConjecture(FriezeError, KeyError):
    pass
