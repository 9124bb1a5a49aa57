"""Exception hierarchy shared by all modules."""


class DunklError(Exception):
    """Base class for all library errors."""


class DomainError(DunklError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class EvaluationError(DunklError, ArithmeticError):
    """A user-supplied field returned a non-finite value."""


class AccuracyError(DunklError, RuntimeError):
    """A numerical routine exhausted its budget before reaching the
    requested tolerance.  Carries the best estimate and its error bound."""

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
