"""Typed errors. Each carries the CLI exit code it maps to."""


class DyndimError(Exception):
    exit_code = 1


class ValidationError(DyndimError):
    """Malformed input: bad rationals, inconsistent systems, wrong domains."""

    exit_code = 2


class DomainMismatch(ValidationError):
    pass


class CoverError(ValidationError):
    """A family that was supposed to cover the space does not."""


class UnsupportedError(ValidationError):
    pass


class BudgetError(DyndimError):
    """An enumeration exceeded its configured budget.

    `partial` holds the best result found so far, if any.
    """

    exit_code = 3

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InvariantError(DyndimError):
    exit_code = 4
