"""Exception hierarchy.

Each family maps to a CLI exit code: domain problems exit 2, convergence
failures 3, exhausted budgets 4.
"""


class ZetaLabError(Exception):
    exit_code = 1


class DomainError(ZetaLabError, ValueError):
    exit_code = 2


class PoleError(DomainError):
    """Evaluation requested at a pole."""


class OnContourZeroError(DomainError):
    """A zero of the target function sits on (or numerically at) the contour."""


class TooCloseToZeroError(DomainError):
    pass


class IsolationError(DomainError):
    pass


class WrongCountError(DomainError):
    pass


class NoCollisionError(DomainError):
    pass


class HigherOrderZeroError(DomainError):
    pass


class IndentationOverlapError(DomainError):
    pass


class UnresolvedScaleError(DomainError):
    """Counting requested at a radius below double-precision resolution
    where the local Taylor test cannot decide."""


class ConvergenceError(ZetaLabError, ArithmeticError):
    exit_code = 3


class PrecisionError(ConvergenceError):
    """Requested accuracy not reachable at maximum truncation."""


class SubdivisionError(ConvergenceError):
    pass


class SingularStallError(ConvergenceError):
    pass


class BudgetError(ZetaLabError):
    exit_code = 4


class NoEmptyShellError(BudgetError):
    def __init__(self, message, counts=None):
        super().__init__(message)
        self.counts = counts


class StepUnderflowError(BudgetError):
    pass
