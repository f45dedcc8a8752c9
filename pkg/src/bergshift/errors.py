"""Exception hierarchy shared by every module."""


class BergshiftError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(BergshiftError, ValueError):
    """A parameter lies outside the admissible range."""


class ZeroWeightError(ParameterError):
    """A shift weight vanishes where the dynamics require non-zero terms."""

    def __init__(self, index):
        super().__init__(f"weight w_{index} is zero")
        self.index = index


class UnsupportedError(BergshiftError):
    """The requested operation does not apply to this weight or space."""


class QuadratureError(BergshiftError, ArithmeticError):
    """An integral failed to converge within the subdivision budget.

    The best value and the achieved error estimate are kept on the
    exception so callers can decide whether to use them anyway.
    """

    def __init__(self, msg, value=None, error=None):
        super().__init__(msg)
        self.value = value
        self.error = error
