"""Exception types shared across the library."""


class LemniscateError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LemniscateError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class SingularInputError(DomainError):
    """The requested evaluation point hits a non-integrable singularity."""


class UnsupportedParameterError(LemniscateError, ValueError):
    """The parameters are valid but the operation is not defined for them."""


class CriticalRegimeError(UnsupportedParameterError):
    """The deformation parameter sits at the phase-transition point t = 1/sqrt(d),
    where none of the expansion formulas are available."""


class RegimeError(UnsupportedParameterError):
    """An asymptotic formula was requested outside its regime of validity."""


class AccuracyError(LemniscateError, RuntimeError):
    """A numerical routine could not reach the requested accuracy.

    The best available estimate is attached as ``estimate`` and the
    estimated relative error as ``achieved``.
    """

    def __init__(self, message, estimate=None, achieved=None):
        super().__init__(message)
        self.estimate = estimate
        self.achieved = achieved


class PrecisionEscalationError(AccuracyError):
    """Extended-precision escalation was exhausted; ``degree`` names the first
    polynomial degree at which positive definiteness was lost."""

    def __init__(self, message, degree, estimate=None):
        super().__init__(message, estimate=estimate)
        self.degree = degree
