"""Exception types shared across the package."""


class GbiasError(Exception):
    """Base class for all errors raised by gbias."""


class DomainError(GbiasError, ValueError):
    """An argument lies outside the domain of the function."""


class PoleError(DomainError):
    """Evaluation requested exactly at a pole."""


class ConvergenceError(GbiasError, ArithmeticError):
    """A numerical procedure stopped before reaching its tolerance."""


class UnsupportedKindError(GbiasError, TypeError):
    """The operation is not implemented for this distribution kind."""


class MeanMismatchError(DomainError):
    """Product of shape parameters does not match the mean of W."""
