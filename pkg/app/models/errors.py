"""
Exception hierarchy shared by the services and the CLI.
"""
from typing import List, Optional


class TransmonError(Exception):
    """Base class for every error raised by this package."""


# =====================
# CONFIGURATION
# =====================

class ConfigError(TransmonError):
    """Invalid input: parameters, config files, CLI flags."""


class ConfigParseError(ConfigError):
    """Config text is not valid JSON."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ConfigValidationError(ConfigError):
    """One or more config fields violate their bounds, or are unknown."""

    def __init__(self, problems: List[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


class InvalidParameter(ConfigError, ValueError):
    """A parameter is outside its allowed range."""


class NonFiniteParameter(InvalidParameter):
    """A parameter is NaN or infinite."""


class AmplitudeOutOfRange(InvalidParameter):
    """A 1/f amplitude lies outside the tabulated range for its channel."""


# =====================
# NUMERICS
# =====================

class SolverError(TransmonError):
    """A numerical computation could not produce a trustworthy result."""


class SolverFailure(SolverError):
    """The eigen-decomposition did not converge or returned non-finite values."""


class NoConvergence(SolverError):
    """E01 did not settle while escalating the charge-basis cutoff."""

    def __init__(self, message: str, last_e01: float, previous_e01: float, ncut: int):
        super().__init__(message)
        self.last_e01 = last_e01
        self.previous_e01 = previous_e01
        self.ncut = ncut


class DegeneratePair(SolverError):
    """Levels 0 and 1 are degenerate; the expectation-gap derivative is undefined."""


class StepUnderflow(SolverError):
    """The finite-difference step is below the resolution of the variable."""


class SweepRowFailure(SolverError):
    """A sweep row failed; the sweep is aborted."""

    def __init__(self, ratio: float, cause: Exception):
        super().__init__(f"sweep row at EJ/Ec = {ratio!r} failed: {cause}")
        self.ratio = ratio
        self.cause = cause


# =====================
# ASYMPTOTICS
# =====================

class AsymptoticError(TransmonError):
    """Calibration or comparison of closed-form scaling laws failed."""


class UnboundedReference(AsymptoticError):
    """The calibration reference T2 is Unbounded or non-positive."""


class GridMismatch(AsymptoticError):
    """Two series do not share an identical, sorted x-grid."""


# =====================
# OUTPUT
# =====================

class OutputError(TransmonError):
    """Writing rows, plots or reports failed."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path


class EmptySeries(OutputError):
    """No data exists for the requested channel."""
