"""Shared exception types.

Every error the library raises deliberately is one of these, so the CLI can
map failures to stable exit codes and tests can assert on the exact failure
mode instead of a bare ValueError.
"""


class SchemaError(ValueError):
    """Input JSON does not match the documented schema."""


class PreconditionError(ValueError):
    """An operation was invoked outside its documented domain."""


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed the configured candidate budget.

    Exceeding the budget is always an error, never a truncated answer.
    """


class InfeasibleRemovalError(ValueError):
    """No removal set exists under the requested coordinate protection."""


class AlreadySolutionFree(Exception):
    """Signal that a system has no solutions, so there is nothing to remove."""
