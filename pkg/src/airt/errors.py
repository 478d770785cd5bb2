"""Exception hierarchy shared across the package."""


class AirtError(Exception):
    """Base class for all errors raised by this package."""


class LoadError(AirtError):
    """A required input file is missing or unreadable."""


class ParseError(AirtError):
    """An input file is present but malformed."""

    def __init__(self, message, *, line=None, row=None, column=None):
        detail = []
        if line is not None:
            detail.append(f"line {line}")
        if row is not None:
            detail.append(f"row {row}")
        if column is not None:
            detail.append(f"column {column}")
        if detail:
            message = f"{message} ({', '.join(detail)})"
        super().__init__(message)
        self.line = line
        self.row = row
        self.column = column


class ConsistencyError(AirtError):
    """Scenario files disagree about instances or algorithms."""


class TransformError(AirtError):
    """Performance values are outside the domain of the requested transform."""


class DegenerateScaleError(TransformError):
    """All performance values are identical so no scale can be established."""


class DegenerateItemError(AirtError):
    """An algorithm column has zero variance (or zero trait covariance)."""

    def __init__(self, message, algorithms=()):
        super().__init__(message)
        self.algorithms = tuple(algorithms)


class FitError(AirtError):
    """Model fitting cannot proceed (for example every item is degenerate)."""


class NumericalError(FitError):
    """The optimisation produced a non-finite quantity."""

    def __init__(self, message, cycle=None):
        if cycle is not None:
            message = f"{message} (cycle {cycle})"
        super().__init__(message)
        self.cycle = cycle


class ConfigurationError(AirtError):
    """A configuration value is inconsistent with the data."""


class AirtFitWarning(UserWarning):
    """Non-fatal fitting event, for example a floored square-root radicand."""
