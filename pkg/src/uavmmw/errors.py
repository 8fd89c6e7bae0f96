"""Exception types shared across the package.

Each class maps to one CLI exit code, see :mod:`uavmmw.cli`.
"""


class UsageError(ValueError):
    """Bad call shape: wrong link type, missing options, empty inputs."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AccuracyError(ArithmeticError):
    """A numerical routine failed to reach its requested tolerance."""


class ValidationFailure(RuntimeError):
    """Analytical model and Monte Carlo oracle disagree beyond tolerance."""
