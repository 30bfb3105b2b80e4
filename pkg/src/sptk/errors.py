"""Exception types raised across the package."""


class SptkError(Exception):
    """Base class for all errors raised by sptk."""


class DimensionError(SptkError, ValueError):
    """Matrix or vector shapes are inconsistent."""


class AssumptionError(SptkError):
    """A stability assumption required by the analysis does not hold.

    The command line maps this family to exit code 2.
    """


class NotHurwitzError(AssumptionError):
    """A generator that must be Hurwitz has an eigenvalue with real part >= 0."""


class ThresholdError(AssumptionError):
    """The slow-certificate margin ``beta > 2 a4 ||C1||^2`` fails."""


class SingularMatrixError(SptkError, ArithmeticError):
    """A linear solve is singular or too badly conditioned to trust."""


class ConfigError(SptkError, ValueError):
    """A configuration file is missing, malformed or inconsistent."""
