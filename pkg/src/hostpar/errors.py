"""Exception types shared across the package.

The CLI maps :class:`DomainError`/:class:`ContractError` to exit code 2 and
:class:`NumericError` to exit code 3.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ContractError(ValueError):
    """An operation was called outside its documented contract
    (e.g. a closed-form solver invoked for a model without a closed form)."""


class NumericError(RuntimeError):
    """An iterative numeric procedure failed to converge.

    Carries whatever diagnostic state was available when the procedure gave
    up (``bracket`` for root solvers, ``last_iterate`` for Newton loops).
    """

    def __init__(self, message, *, bracket=None, last_iterate=None):
        super().__init__(message)
        self.bracket = bracket
        self.last_iterate = last_iterate


class BracketError(NumericError):
    """A sign-change bracket required by a bisection solver was not found."""
