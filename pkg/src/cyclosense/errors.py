"""Exception types shared across the package."""


class CyclosenseError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(CyclosenseError):
    """Invalid parameter, spec, or input format. CLI exit code 2."""


class CalibrationError(CyclosenseError):
    """Threshold calibration cannot proceed (e.g. too few samples)."""
