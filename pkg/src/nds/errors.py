"""Exception hierarchy shared by all nds modules."""


class NdsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(NdsError):
    """An input image, mask, or array violates a contract (shape, channels, range)."""


class InvalidParameterError(NdsError):
    """A scalar parameter is out of its legal range (sigma <= 0, even kernel size, ...)."""


class ConfigError(NdsError):
    """A configuration file or sampling-range definition is malformed or empty."""


class DegenerateGeometryError(NdsError):
    """Camera rig geometry does not admit a well-defined bounding sphere."""


class IngestionError(NdsError):
    """Raw data on disk does not match the expected layout (count mismatch, bad poses)."""


class VerifyError(NdsError):
    """A rebuilt sample did not reproduce the stored output bit-for-bit."""
