"""Error taxonomy shared across the package.

Contract violations raise UsageError so callers can distinguish bad inputs
from genuine numerical failure (BlowUpError) or an operation a system does
not support (UnsupportedError).
"""


class UsageError(ValueError):
    """Caller violated an operation's precondition (bad tag, empty set, ...)."""


class BlowUpError(RuntimeError):
    """A trajectory left the admissible region during integration."""


class UnsupportedError(RuntimeError):
    """The requested diagnostic is undefined for this system."""


class ForcingFormatError(ValueError):
    """A forcing description file failed schema validation."""
