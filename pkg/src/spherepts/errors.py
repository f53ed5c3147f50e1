"""Shared exception types.

The CLI maps these to exit codes: BudgetError -> 2, EmptySetError -> 4.
"""


class BudgetError(RuntimeError):
    """A requested computation exceeds a configured size ceiling."""


class EmptySetError(ValueError):
    """An operation that needs a nonempty point set got an empty one."""


class CoincidentPointsError(ValueError):
    """Two coincident points make the requested statistic infinite."""
