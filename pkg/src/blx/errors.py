"""Exception types raised by the blx library.

Everything deliberate raised here derives from :class:`BlxError`, so callers
(including the command line front end) can distinguish bad input data from
programming errors with a single ``except`` clause.
"""


class BlxError(Exception):
    """Base class for all blx domain errors."""


class WindowNotCovered(BlxError):
    """A series does not cover the requested fitting window."""


class SingularSystem(BlxError):
    """The regularized normal equations could not be factorized."""


class SeriesTooShort(BlxError):
    """A series is shorter than an operation requires."""


class InsufficientHistory(BlxError):
    """Not enough past observations to anchor a baseline forecast."""


class LengthMismatch(BlxError):
    """Two series that must align point-for-point do not."""


class IncomparableReports(BlxError):
    """Residual reports differ in metric or point count and cannot be compared."""


class MissingColumn(BlxError):
    """A requested CSV column does not exist."""


class NonNumericCell(BlxError):
    """A CSV cell expected to hold a number is empty or unparseable.

    Carries the 1-based data row number, the column selector, and the
    offending cell content.
    """

    def __init__(self, row: int, column, content: str):
        self.row = row
        self.column = column
        self.content = content
        super().__init__(
            f"row {row}, column {column!r}: not a number: {content!r}"
        )
