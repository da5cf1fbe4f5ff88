"""Exception hierarchy shared by all slicekit modules.

``SliceKitError`` is the common base.  ``ValidationError`` subclasses map to
CLI exit code 2, ``UsageError`` to exit code 1, ``InternalError`` to 3.
"""


class SliceKitError(Exception):
    pass


class UsageError(SliceKitError):
    """Bad command-line arguments or missing files."""


class ValidationError(SliceKitError):
    """Input data violates a documented contract."""


class InternalError(SliceKitError):
    """A slicekit invariant was broken; indicates a bug, not bad input."""


class UnsupportedRankError(ValidationError):
    pass


class InvalidExtentError(ValidationError):
    pass


class BoundsError(ValidationError):
    pass


class ShapeError(ValidationError):
    pass


class LayoutError(ValidationError):
    pass


class InvalidGroupingError(ValidationError):
    pass


class DegenerateSplitError(ValidationError):
    pass


class InvalidOrderError(ValidationError):
    pass


class GraphError(ValidationError):
    """Graph construction / parse / validation failure with context."""


class ConfigError(ValidationError):
    pass


class CapacityError(ValidationError):
    pass


class DataError(ValidationError):
    pass


class SelectionError(ValidationError):
    pass


class EmissionError(ValidationError):
    pass


class BindingError(ValidationError):
    pass
