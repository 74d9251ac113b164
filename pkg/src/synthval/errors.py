"""Exception hierarchy shared across the toolkit.

Each family maps to a distinct CLI exit code (see cli.py):
usage errors are argparse's domain (exit 2), I/O errors exit 3,
validation errors exit 4, numeric errors exit 5.
"""


class SynthvalError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(SynthvalError):
    """Inputs violate a documented precondition or invariant."""


class IngestError(SynthvalError):
    """A referenced file is missing or unreadable."""


class FormatError(SynthvalError):
    """A file exists but its contents do not parse."""


class InsufficientSamplesError(ValidationError):
    """An operation needs more samples than were supplied."""


class DegenerateSampleError(ValidationError):
    """A sample has no variation where variation is required."""


class NumericError(SynthvalError):
    """A numeric routine left its domain of validity (e.g. non-PSD input)."""
