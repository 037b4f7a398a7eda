from typing import Any


class ConfigurationError(Exception):
    """Invalid user or physical input. Maps to CLI exit code 2."""

    exit_code = 2


class NumericalError(Exception):
    """A computation could not produce a trustworthy number. Maps to exit code 3."""

    exit_code = 3


class DomainError(ConfigurationError, ValueError):
    pass


class SourceConstructionError(ConfigurationError):
    """Raised from model validators; propagates through pydantic unchanged."""


class ScanConfigError(ConfigurationError, ValueError):
    pass


class DegenerateProfileError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ResolutionError(NumericalError):
    pass


class UndefinedVisibilityError(NumericalError):
    pass


class AperiodicInputError(NumericalError):
    pass


class FitError(NumericalError):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class OracleCheckFailed(NumericalError):
    pass
