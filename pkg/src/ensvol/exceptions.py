"""Exception hierarchy shared by every ensvol module."""


class EnsvolError(Exception):
    """Base class for all library errors."""


class ValidationError(EnsvolError, ValueError):
    """An input violates a documented invariant.

    The message always names the violated check so that the CLI can echo it
    verbatim.
    """


class UnsupportedOperationError(EnsvolError, TypeError):
    """The operation is not defined for this kind of ensemble."""


class NumericalError(EnsvolError, ArithmeticError):
    """A numerical procedure failed (non-convergence, loss of definiteness)."""


class ConvergenceError(NumericalError):
    pass
