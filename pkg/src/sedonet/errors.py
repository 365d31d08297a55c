"""Exception types shared across the package.

Everything raised on purpose derives from SedonetError so callers (and the
CLI) can distinguish our failures from genuine bugs. I/O failures from the
filesystem itself propagate as the built-in OSError.
"""


class SedonetError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SedonetError):
    """A coordinate fell outside the declared physical domain."""


class ShapeError(SedonetError):
    """An array argument had the wrong shape or dimensionality."""


class ConfigError(SedonetError):
    """A configuration value is missing, inconsistent, or out of range."""


class SolverError(SedonetError):
    """An iterative solver failed to converge within its budget."""


class GenerationError(SedonetError):
    """Data generation produced unusable samples (blow-up, rejection storm)."""


class DivergenceError(SedonetError):
    """Training loss became non-finite."""


class FormatError(SedonetError):
    """A binary file is corrupt, truncated, or has the wrong layout."""


class DegenerateReference(SedonetError):
    """A reference field with zero norm cannot anchor a relative error."""
