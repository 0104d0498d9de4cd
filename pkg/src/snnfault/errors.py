"""Exception types shared across the package."""


class SnnFaultError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(SnnFaultError, ValueError):
    """A configuration object is invalid or dimensions do not match."""


class InputError(SnnFaultError, ValueError):
    """An argument or input value is outside its allowed domain."""


class DataLoadError(SnnFaultError, ValueError):
    """A dataset file could not be parsed.

    Carries the 1-based file row and the column (index or name) where
    parsing failed, when that location is known.
    """

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class EvaluationError(SnnFaultError, RuntimeError):
    """Classification cannot proceed, e.g. no neuron ever received a marker."""
