"""Exception types shared across the package.

The CLI maps these onto exit codes: validation/precondition failures exit
with 2, exhausted iteration or term budgets exit with 3.
"""


class IfsQuantError(Exception):
    """Base class for all package errors."""


class ValidationError(IfsQuantError):
    """A precondition or construction invariant was violated."""


class DivergenceError(ValidationError):
    """A series was evaluated outside its region of convergence."""


class InstanceTooLargeError(ValidationError):
    """An exact solver was asked for an instance beyond its hard cap."""


class InsufficientDataError(ValidationError):
    """Not enough usable data points for the requested estimate."""


class BudgetError(IfsQuantError):
    """An iteration or term budget ran out before reaching tolerance.

    ``best`` carries the best iterate found so far, when one exists.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
