"""Exception types shared across the toolkit.

All inherit from ValueError so callers that don't care about the fine
distinctions can catch them the usual way.
"""


class PlcError(ValueError):
    """Base class for all toolkit errors."""


class InvalidParameterError(PlcError):
    """A model parameter violates its declared range."""


class DomainError(PlcError):
    """A function argument lies outside the function's domain."""


class InvalidInputError(PlcError):
    """An input series or sample violates a precondition."""


class DegenerateSeriesError(PlcError):
    """A series is degenerate for the requested transform (e.g. log of zero)."""


class ResolutionError(PlcError):
    """The sampling step is too coarse to resolve the requested feature."""


class AlignmentError(PlcError):
    """Two series that must share a grid do not."""


class StepSizeError(PlcError):
    """An integration step violates the stability bound."""


class HorizonError(PlcError):
    """The data horizon is too short for the requested estimation."""


class InfeasibleError(PlcError):
    """No candidate parameter value satisfies the feasibility constraints."""


class ParseError(PlcError):
    """A data file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class EmptyInputError(PlcError):
    """A data file contains no data rows."""


class ConvergenceError(PlcError):
    """An iterative procedure exhausted its budget without converging."""
