"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: :class:`InvalidInputError` (and its
subclass :class:`NotAContractionError`) exit with 3, :class:`NumericalFailure`
exits with 4.
"""


class HarnackError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(HarnackError, ValueError):
    """Malformed, non-finite, mis-shaped or out-of-domain input."""


class NotAContractionError(InvalidInputError):
    """An operator (or a requested construction) has norm exceeding 1."""


class NumericalFailure(HarnackError, ArithmeticError):
    """A computation did not meet its own accuracy postcondition.

    ``partial`` carries whatever partial result was available (for example
    the last iterate of a fixed-point loop), or ``None``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SingularResolventError(HarnackError, ArithmeticError):
    """``I - lam*T`` is not invertible for the requested spectral parameter."""
