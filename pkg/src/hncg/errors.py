"""Exception hierarchy and process exit codes.

Exit code contract (used by the CLI):
    0  success
    2  validation error (bad inputs, schema violations, parse errors)
    3  plug failure (external process protocol)
    4  numerical failure (non-convergence, invalid covariance)
"""

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PLUG = 3
EXIT_NUMERICAL = 4


class HncgError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ValidationError(HncgError):
    exit_code = EXIT_VALIDATION


class ObjParseError(ValidationError):
    """OBJ grammar or index violation; carries the 1-based source line."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SceneError(ValidationError):
    """Scene document violates the schema or its invariants."""


class BehindCameraError(ValidationError):
    """Point lies on or behind the pinhole plane (z >= 0) and is culled."""


class PlugError(HncgError):
    exit_code = EXIT_PLUG


class PlugProcessError(PlugError):
    """External command exited nonzero."""

    def __init__(self, message: str, returncode: int):
        super().__init__(message)
        self.returncode = returncode


class PlugTimeoutError(PlugError):
    """External command exceeded its time budget."""


class PlugOutputError(PlugError):
    """External command output missing or unreadable."""


class PlugDimensionError(PlugError):
    """External command output has the wrong dimensions."""


class NumericalError(HncgError):
    exit_code = EXIT_NUMERICAL


class ConvergenceError(NumericalError):
    """Iterative solver did not reach tolerance within its budget."""


class CovarianceError(NumericalError):
    """Covariance matrix is not numerically positive semi-definite."""
