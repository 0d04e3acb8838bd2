"""Exception types shared across the package."""


class AdcLabError(Exception):
    """Base class for all errors raised by adclab."""


class NotHermitian(AdcLabError, ValueError):
    pass


class NotUnitary(AdcLabError, ValueError):
    pass


class OutOfRange(AdcLabError, ValueError):
    pass


class DimensionMismatch(AdcLabError, ValueError):
    pass


class LengthMismatch(AdcLabError, ValueError):
    pass


class BadIndex(AdcLabError, IndexError):
    pass


class BadPriors(AdcLabError, ValueError):
    pass


class ParamCountMismatch(AdcLabError, ValueError):
    pass


class NotConverged(AdcLabError, RuntimeError):
    """Iterative solver stopped before meeting its tolerance.

    The best iterate is attached as ``result`` so callers can still use it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
