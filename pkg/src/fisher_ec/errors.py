"""Exception hierarchy for the capacity engine."""


class FisherECError(Exception):
    """Base class; carries the name of the operation that failed."""

    def __init__(self, message, operation=None):
        super().__init__(message)
        self.operation = operation


class DomainError(FisherECError, ValueError):
    """Argument outside the domain of the function."""


class NonConvergenceError(FisherECError, ArithmeticError):
    """A series or iteration failed to meet its tolerance within budget."""


class ContourError(FisherECError, ValueError):
    """Contour abscissa does not separate the pole families, or sits on a pole."""


class ToleranceError(FisherECError, ArithmeticError):
    """Tail bound, node budget, or imaginary residual failed the tolerance."""


class DivergenceError(FisherECError, ArithmeticError):
    """The requested integral or moment is infinite for these parameters."""


class BracketError(FisherECError, ArithmeticError):
    """Root-finding bracket does not change sign."""
