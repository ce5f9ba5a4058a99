"""Exception hierarchy for the solver."""


class MesofickError(Exception):
    """Base class for all library errors."""


class ConfigError(MesofickError):
    """Invalid configuration or parameter file."""


class DomainError(MesofickError, ValueError):
    """Input outside the mathematical domain of an operation."""


class GridMismatchError(MesofickError, ValueError):
    """Fields or kernels built on incompatible discretizations."""


class RegimeError(MesofickError, RuntimeError):
    """The solver left the regime in which the scheme is valid."""


class ContractionLossError(RegimeError):
    """Observed gain bound reached 1: the resolvent series no longer converges."""


class WindowViolationError(RegimeError):
    """An iterate left the admissible magnetization window."""


class IterationLimitError(RegimeError):
    """An iteration cap was exceeded before the tolerance was met."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class BracketError(RegimeError):
    """A root was not bracketed: inconsistent current/boundary data."""


class TargetRangeError(RegimeError):
    """A shooting target requires inputs outside the admissible square."""
