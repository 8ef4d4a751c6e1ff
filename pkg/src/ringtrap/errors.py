"""Exception types shared across the package."""


class RingtrapError(Exception):
    """Base class for all package errors."""


class UnitError(RingtrapError, ValueError):
    """Unknown or unsupported unit conversion."""


class ConfigError(RingtrapError, ValueError):
    """Invalid, unknown, or out-of-range configuration input."""


class ConvergenceError(RingtrapError, RuntimeError):
    """An iterative numerical procedure failed to converge.

    ``best`` carries the best iterate found so far, when available.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NotAMinimumError(RingtrapError, ValueError):
    """The supplied point is not a harmonic local minimum."""


class FitError(RingtrapError, RuntimeError):
    """Nonlinear least-squares fit failed."""


class MeasurementError(RingtrapError, RuntimeError):
    """Image radius measurement could not be completed."""
