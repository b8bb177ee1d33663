"""Exception types raised by the lrw package."""


class LrwError(Exception):
    """Base class for all package errors."""


class GraphFormatError(LrwError, ValueError):
    """An edge-list or community file could not be parsed."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class ParameterError(LrwError, ValueError):
    """A parameter is outside its valid range or a spec is infeasible."""
