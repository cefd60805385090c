"""Exception and warning types shared across the package."""


class HorocorrError(Exception):
    """Base class for package errors."""


class DimensionError(HorocorrError, ValueError):
    pass


class ModelError(HorocorrError, ValueError):
    """A vector is not on the expected model set (hyperboloid, de Sitter, null cone)."""


class DomainError(HorocorrError, ValueError):
    """A point lies outside the domain of a conformal metric or chart."""


class MathDomainError(HorocorrError, ArithmeticError):
    """A formula is evaluated at a singularity (lambda >= 1/2, kappa = -1, blow-up)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DegenerateImmersionWarning(UserWarning):
    """Emitted when a constructed map fails to be an immersion somewhere."""
