"""Exception types shared across the package."""


class StochlimError(Exception):
    """Base class for all package-specific errors."""


class CapabilityError(StochlimError):
    """A requested order exceeds what the implementation is configured for."""


class AccuracyError(StochlimError):
    """A numerical routine could not reach the requested tolerance.

    Carries the best value obtained and the achieved error bound so callers
    can decide whether the partial result is still usable.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class UnsupportedInputError(StochlimError):
    """Input is outside the supported problem class (not a tolerance issue)."""


class InsufficientDataError(StochlimError):
    """Too few usable data points for the requested fit."""


class TruncationOverflowError(StochlimError):
    """An operator application would push amplitude past the particle cutoff."""


class IllConditionedFitError(StochlimError):
    """A least-squares extraction was refused because of its condition number."""


class ConfigError(StochlimError):
    """A run configuration is malformed; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
