"""Exception types shared across the library.

Each error carries a short machine-readable ``code`` that the CLI emits on
stderr so batch drivers can dispatch on failures without parsing prose.
"""


class LineSegError(ValueError):
    """Base class for all domain errors raised by this package."""

    code = "error"


class NoBlobLinesError(LineSegError):
    """Raised when a blob-line mask contains no foreground at all."""

    code = "no-blob-lines"

    def __init__(self, message="no blob lines detected"):
        super().__init__(message)


class BetaUndefinedError(LineSegError):
    """Raised when beta is requested for a neighbor graph with no edges."""

    code = "beta-undefined"

    def __init__(self, message="beta undefined: neighbor graph has no edges"):
        super().__init__(message)


class DimensionMismatchError(LineSegError):
    """Raised when two rasters that must share a page size do not."""

    code = "dimension-mismatch"


class InvalidLabelingError(LineSegError):
    """Raised when a labeling does not assign a valid label to every component."""

    code = "invalid-labeling"
