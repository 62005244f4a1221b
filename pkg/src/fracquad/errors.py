"""Exception hierarchy.

Domain errors (bad parameters) and convergence errors (an iteration ran out
of budget) are kept apart so callers, and the command line, can tell them
apart.
"""


class FracquadError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FracquadError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """Evaluation at a pole of a special function."""


class NonFiniteError(DomainError):
    """A user-supplied function returned a non-finite value."""


class RegionError(DomainError):
    """An asymptotic formula was asked for outside its region of validity."""


class SpecialFunctionOverflow(FracquadError, OverflowError):
    """The result does not fit in double precision."""


class ConvergenceError(FracquadError, RuntimeError):
    """An iterative method exhausted its iteration budget."""


class AccuracyError(ConvergenceError):
    """A series could not reach the requested relative tolerance."""


class NewtonDivergenceError(ConvergenceError):
    def __init__(self, message: str, index: int | None = None) -> None:
        super().__init__(message)
        #: 1-based index of the node that failed, if known.
        self.index = index
