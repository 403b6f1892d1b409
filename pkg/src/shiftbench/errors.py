"""Exception types shared across the package.

The CLI maps these onto process exit codes: validation failures exit 2,
I/O failures (plain OSError) exit 3, prediction-coverage failures exit 4.
"""


class ShiftbenchError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ShiftbenchError):
    """Bad input data, bad configuration, or a violated precondition."""


class ManifestParseError(ValidationError):
    """A manifest line failed to parse; carries the 1-based line number."""

    def __init__(self, path, line_no: int, reason: str):
        self.path = str(path)
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"{self.path}:{line_no}: {reason}")


class CapacityError(ValidationError):
    """A resample target exceeds the available samples of some class."""


class DegenerateScenarioError(ValidationError):
    """A shift scenario boosts a class that has zero base count."""


class UndefinedSimilarityError(ValidationError):
    """Cosine similarity was requested against a zero-norm vector."""


class UnscorableSampleError(ValidationError):
    """A sample has neither an embedding reference nor prompt keywords."""


class EmptyOracleError(ValidationError):
    """The synthetic pool contains no scorable samples."""


class UndefinedReportError(ValidationError):
    """A classification report was requested for zero evaluated samples."""


class CoverageError(ShiftbenchError):
    """A prediction file is missing sample ids required by the evaluation."""

    def __init__(self, message: str, missing_ids=()):
        self.missing_ids = list(missing_ids)
        super().__init__(message)
