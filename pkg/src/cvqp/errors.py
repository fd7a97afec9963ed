"""Exception hierarchy.

Every error raised by the package derives from :class:`CVQPError`, which is
itself a :class:`ValueError` so callers validating user input can catch
either.
"""


class CVQPError(ValueError):
    """Base class for all package errors."""


class InvalidWidthError(CVQPError):
    """A wavepacket width was not strictly positive and finite."""


class InvalidWeightError(CVQPError):
    """An attenuation weight was zero or exceeded one in magnitude."""


class ConfigurationError(CVQPError):
    """Inputs are individually valid but inconsistent with each other."""


class InfeasibleBudgetError(CVQPError):
    """An energy budget is too small for the requested displacement."""


class CoverageError(CVQPError):
    """A numerical grid does not cover the wavepackets placed on it."""
