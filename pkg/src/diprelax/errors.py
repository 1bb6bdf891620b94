"""Exception hierarchy shared across the package."""


class DipRelaxError(Exception):
    """Base class for all errors raised by diprelax."""


class InputError(DipRelaxError, ValueError):
    """Rejected input: out of range, unsupported value, bad shape."""


class UnknownUnitError(InputError):
    """Unit tag is not in the supported laboratory/SI vocabulary."""


class UnsupportedStatisticsError(InputError):
    """Species statistics not covered by the closed-form cross sections."""


class ConfigError(InputError):
    """Config or CSV parse failure; message carries file coordinates."""


class InsufficientDataError(InputError):
    """Not enough data points left to run the requested fit."""


class NumericalError(DipRelaxError, RuntimeError):
    """A numerical procedure failed; diagnostics are attached."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class DegenerateFitError(NumericalError):
    """Normal matrix of a least-squares problem is singular."""
