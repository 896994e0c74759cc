"""Exception types shared across the package."""


class RootfinderError(Exception):
    """Base class for all package-specific errors."""


class SelfLoopError(RootfinderError):
    """An edge joins a vertex to itself."""


class DuplicateEdgeError(RootfinderError):
    """The same undirected edge appears more than once."""


class CycleOrDisconnectedError(RootfinderError):
    """The edge set is not a tree (wrong edge count, cycle, or disconnected)."""


class BadSizeError(RootfinderError):
    """A requested tree size is below the supported minimum."""


class TooLargeError(RootfinderError):
    """An exact/enumeration operation was asked for an unsupported size."""


class NonIntegerResultError(RootfinderError):
    """An exact counting formula failed to divide evenly (implementation bug)."""


class UnsupportedModelError(RootfinderError):
    """The requested model has no exact posterior (alpha outside {0, 1})."""


class BadTError(RootfinderError):
    """A tail-bound threshold t lies outside its valid open interval."""
