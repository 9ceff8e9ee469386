"""Exception types shared across the package.

The split matters for the windowed pipeline and the CLI: degenerate-data
conditions (constant segments, undecorrelated windows, too few usable lags)
are recoverable per window and become flagged records, while everything else
aborts the run.
"""


class RecurConnectError(Exception):
    """Base class for all errors raised by this package."""


class CsvFormatError(RecurConnectError):
    """Malformed CSV input. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlignmentError(RecurConnectError):
    """Series cannot be aligned onto a common date axis."""


class DegenerateSeriesError(RecurConnectError):
    """Constant input, zero variance, or otherwise unusable data."""


class NoDecorrelationError(RecurConnectError):
    """The autocorrelation function never falls below 1/e in range."""


class InsufficientLagsError(RecurConnectError):
    """Too few usable lags remain beyond the autocorrelation time."""
