"""Exception hierarchy.

Configuration problems derive from :class:`ConfigError` (CLI exit code 2);
problems detected while computing derive from :class:`NumericalError`
(CLI exit code 3).
"""


class SlmSpecError(Exception):
    pass


class ConfigError(SlmSpecError, ValueError):
    """Invalid input values or configuration."""


class NumericalError(SlmSpecError, RuntimeError):
    """A computation could not produce a trustworthy result."""


class AliasingError(NumericalError):
    """Sampling grid is too coarse for the fringes it must resolve."""


class InsufficientScanError(NumericalError):
    """Scan range holds too few beat periods."""


class NoFringesError(NumericalError):
    """Trace is constant, so there is nothing to measure."""
