"""Exception hierarchy.

``ConfigError`` subclasses signal bad input (CLI exit code 2); every other
``EurError`` is a numerical failure (exit code 3).
"""


class EurError(Exception):
    """Base class for all package errors."""


class ConfigError(EurError):
    pass


class NotSquare(EurError):
    pass


class NotHermitian(EurError):
    pass


class DimensionMismatch(EurError):
    pass


class InvalidState(EurError):
    pass


class PartyError(ConfigError):
    pass


class AxisError(ConfigError):
    pass


class CapExceeded(ConfigError):
    pass


class MissingPartnerBasis(ConfigError):
    pass


class MissingTable(ConfigError):
    pass


class InvalidDistribution(EurError):
    pass


class NoCrossing(EurError):
    pass
