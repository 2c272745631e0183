"""Exception hierarchy shared by all simulcomp modules."""


class SimulcompError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(SimulcompError, ValueError):
    """Input data or arguments failed validation."""


class SchemaError(ValidationError):
    """A required CSV column is missing."""


class DegenerateDesignError(ValidationError):
    """The design cannot be fitted (empty cell, no residual df, ...)."""


class ConvergenceError(SimulcompError, ArithmeticError):
    """A numerical routine failed to reach its tolerance.

    ``bracket`` carries the last search interval when one exists.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket
