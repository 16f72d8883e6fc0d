"""Exception hierarchy shared by the library and the command-line tool."""


class SketchbootError(Exception):
    """Base class for every error raised by sketchboot."""


class DimensionError(SketchbootError, ValueError):
    pass


class NonFiniteError(SketchbootError, ValueError):
    pass


class InvalidProbabilitiesError(SketchbootError, ValueError):
    pass


class ConfigError(SketchbootError, ValueError):
    pass


class MatrixFormatError(SketchbootError, OSError):
    pass


class TruncatedMatrixError(MatrixFormatError):
    pass


class NotPositiveDefiniteError(SketchbootError, ValueError):
    pass


class NumericalError(SketchbootError, ArithmeticError):
    pass


class ReplicateFailure(NumericalError):
    """An SVD failed inside bootstrap replicate ``b`` (1-based)."""

    def __init__(self, b, reason):
        self.b = b
        self.reason = reason
        super().__init__(f'bootstrap replicate {b} failed: {reason}')


class ExactSvdTooLarge(NumericalError):
    pass
