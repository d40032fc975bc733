"""Exception types shared across the package."""


class ChunkSelectError(Exception):
    """Base class for all package errors."""


class BatchValidationError(ChunkSelectError):
    """Raw candidate data cannot form a valid batch (shape, finiteness, emptiness)."""

    def __init__(self, message: str, candidate: int | None = None):
        super().__init__(message)
        self.candidate = candidate


class DegenerateBatchError(ChunkSelectError):
    """Operation needs at least two candidates (e.g. median pairwise distance)."""


class InsufficientCandidatesError(ChunkSelectError):
    """Fewer candidates than clusters requested."""


class ScenarioError(ChunkSelectError):
    """Scenario document is malformed or inconsistent."""


class BatchFileError(ChunkSelectError):
    """Batch file cannot be parsed; carries a location when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column
