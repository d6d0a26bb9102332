"""Exception types shared across the package."""


class TTMError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(TTMError):
    """Invalid graph data (involution, valence, connectivity, adjacency)."""


class PathError(TTMError):
    """Invalid or unsuitable edge path (non-adjacent, unreduced, trivial)."""


class MapError(TTMError):
    """Invalid graph map data or incompatible domains/codomains."""


class PreconditionError(TTMError):
    """An operation was called on input that fails its precondition
    (not train track, not expanding, contracted edges, ...)."""


class IncompleteTableError(TTMError):
    """A measure table does not cover the paths needed by an operation."""


class SpectralError(TTMError):
    """No matching eigenvalue / malformed matrix input."""


class ParseError(TTMError):
    """Syntax or reference error in an input document."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, col {column}: {message}"
        super().__init__(message)
