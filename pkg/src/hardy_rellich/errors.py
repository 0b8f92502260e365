"""Exception hierarchy shared by every module."""


class HardyRellichError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSupport(HardyRellichError, ValueError):
    pass


class InsufficientSmoothness(HardyRellichError, ValueError):
    pass


class ExcludedParameter(HardyRellichError, ValueError):
    """A parameter value at which the requested identity is not defined."""


class ZeroC(HardyRellichError, ValueError):
    pass


class ZeroDenominator(HardyRellichError, ZeroDivisionError):
    pass


class OverflowGuard(HardyRellichError, OverflowError):
    pass


class NoConvergence(HardyRellichError, ArithmeticError):
    """Adaptive quadrature hit ``max_depth`` before meeting its tolerance.

    The partial result is kept on ``self.result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DegenerateSampling(HardyRellichError, ArithmeticError):
    pass


class ConfigError(HardyRellichError, ValueError):
    pass
