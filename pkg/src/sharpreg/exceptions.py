"""Exception types raised by the library."""


class SharpRegError(Exception):
    """Base class for all library errors."""

    kind = "error"


class UnsupportedSmoothnessError(SharpRegError, ValueError):
    kind = "unsupported-smoothness"


class EmptyIntervalError(SharpRegError, ValueError):
    kind = "empty-interval"


class DegenerateSampleError(SharpRegError, ValueError):
    kind = "degenerate-sample"


class TooSmallIntervalError(SharpRegError, ValueError):
    kind = "too-small-interval"


class NonBracketingError(SharpRegError, RuntimeError):
    kind = "non-bracketing"


class ConfigError(SharpRegError, ValueError):
    kind = "config"
