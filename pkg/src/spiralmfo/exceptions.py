"""Exception types raised across the package."""


class SpiralMfoError(Exception):
    """Base class for all package errors."""


class DomainError(SpiralMfoError, ValueError):
    """A numeric argument lies outside the function's domain."""


class DegenerateKernelError(SpiralMfoError, ValueError):
    """A spiral kernel whose radius is identically zero."""


class DimensionError(SpiralMfoError, ValueError):
    """Vector or matrix shapes do not agree."""


class ObjectiveError(SpiralMfoError, RuntimeError):
    """The objective returned a non-finite value.

    The offending position is kept on ``position`` for inspection.
    """

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class EmptyBatchError(SpiralMfoError, ValueError):
    """An operation received zero samples."""


class ParseError(SpiralMfoError, ValueError):
    """A data file row could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(SpiralMfoError, ValueError):
    """A data file has the wrong overall shape."""


class SizeError(SpiralMfoError, ValueError):
    """Not enough samples to satisfy a request."""


class ConfigError(SpiralMfoError, ValueError):
    """Invalid experiment or optimizer configuration."""


class RunError(SpiralMfoError, RuntimeError):
    """A single optimization run inside an experiment failed."""

    def __init__(self, algorithm, seed, cause):
        super().__init__(f"run failed for algorithm={algorithm} seed={seed}: {cause}")
        self.algorithm = algorithm
        self.seed = seed
        self.cause = cause
