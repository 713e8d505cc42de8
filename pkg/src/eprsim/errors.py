"""Exception types shared across the package."""


class EprsimError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(EprsimError, ValueError):
    """A scenario or model configuration is invalid."""


class UnsaturatedError(EprsimError, ValueError):
    """The internal field is not positive: the magnet is not saturated."""


class FitError(EprsimError, ValueError):
    """A curve fit cannot be set up on the given data."""
