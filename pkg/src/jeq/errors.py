"""Exception hierarchy shared by every jeq module.

Each class carries an ``exit_code`` so the command line front end can map a
failure to a process status without inspecting the exception type.
"""

from typing import Any, List, Optional, Tuple


class JeqError(Exception):
    """Base class for all errors raised by the jeq package."""
    exit_code = 1


# --- Numerical failures (exit code 2) ---

class NumericalError(JeqError):
    """A computation left the regime where it is well defined."""
    exit_code = 2


class NonPositiveMetric(NumericalError):
    """The reference metric g is not positive definite."""
    pass


class NonHermitian(NumericalError):
    """A matrix that must be Hermitian is not."""
    pass


class PositivityLost(NumericalError):
    """A form is not positive definite relative to g.

    Attributes:
        index: Grid multi-index of the offending point, when known.
    """

    def __init__(self, message: str, index: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.index = index


class NonAdmissible(NumericalError):
    """A spectrum contains a non-positive (or numerically zero) value."""
    pass


class InfeasibleThreshold(NumericalError):
    """No threshold pair (theta, N) can be built for the given inputs."""
    pass


class HypothesisViolation(NumericalError):
    """Inputs to the threshold check do not satisfy its hypotheses."""
    pass


class InsufficientOrder(NumericalError):
    """A Taylor jet is too short for the requested derivative."""
    pass


class GridTooSmall(NumericalError):
    """A grid axis has fewer points than the stencils need."""
    pass


class BoxGridUnsupported(NumericalError):
    """The operation is only defined on periodic grids."""
    pass


class LinearSolveFailure(NumericalError):
    """The Krylov solve stagnated before reaching its tolerance."""

    def __init__(self, message: str, iterations: int = 0):
        super().__init__(message)
        self.iterations = iterations


class StepFailure(NumericalError):
    """No step length in the line search kept the iterate admissible and decreasing."""

    def __init__(self, message: str, history: Optional[List[Any]] = None):
        super().__init__(message)
        self.history = list(history or [])


class SubsolutionViolation(NumericalError):
    """The supplied subsolution fails the discrete subsolution check."""

    def __init__(self, message: str, index: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.index = index


class ContinuityExhausted(NumericalError):
    """The continuity path failed on a leg even after refining the t-grid."""

    def __init__(self, message: str, history: Optional[List[Any]] = None):
        super().__init__(message)
        self.history = list(history or [])


class NotSolved(NumericalError):
    """A routine that needs a converged state received an unconverged one."""
    pass


# --- Input failures (exit code 3) ---

class InputError(JeqError):
    """Bad user input: configuration, files, names or expressions."""
    exit_code = 3


class ConfigError(InputError):
    """A configuration key is missing, unknown or invalid.

    Attributes:
        key: The offending key.
        line: 1-based line in the config file, or None when the key is missing.
    """

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        where = f" (line {line})" if line is not None else ""
        prefix = f"{key}: " if key else ""
        super().__init__(f"{prefix}{message}{where}")
        self.key = key
        self.line = line


class ParseError(InputError):
    """A field file is malformed."""

    def __init__(self, message: str, line: Optional[int] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


class UnknownEntry(InputError):
    """A catalog entry or variant name is not known."""
    pass


class ExpressionError(InputError):
    """An expression uses syntax outside the supported grammar."""
    pass


class IoError(InputError):
    """A report or field could not be written."""
    pass
