"""Exception hierarchy shared by all solver modules."""


class DelayOrbitError(Exception):
    """Base class for every error raised by this package."""


class EvenGridSize(DelayOrbitError, ValueError):
    pass


class TooFewSamples(DelayOrbitError, ValueError):
    pass


class LevelTooHigh(DelayOrbitError, ValueError):
    pass


class ZeroStep(DelayOrbitError, ValueError):
    pass


class DimensionMismatch(DelayOrbitError, ValueError):
    pass


class JacobianMismatch(DelayOrbitError):
    pass


class IntegratorBlowup(DelayOrbitError, ArithmeticError):
    pass


class NotAnOrbit(DelayOrbitError):
    pass


class ShootingDiverged(DelayOrbitError):
    pass


class DegenerateSeed(DelayOrbitError):
    pass


class SingularJacobian(DelayOrbitError, ArithmeticError):
    pass


class MaxIterExceeded(DelayOrbitError):
    """Newton ran out of iterations; the partial report is attached."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class LineSearchFailed(DelayOrbitError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InsufficientPoints(DelayOrbitError, ValueError):
    pass


class MinDelayTooSmall(DelayOrbitError, ValueError):
    pass


class ConfigError(DelayOrbitError, ValueError):
    pass
