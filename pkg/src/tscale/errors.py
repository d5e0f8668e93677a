"""Exception hierarchy shared by every module."""


class TimeScaleError(Exception):
    """Base class for all errors raised by tscale."""


class NotInTimeScale(TimeScaleError, ValueError):
    def __init__(self, t, message=None):
        self.t = t
        super().__init__(message or f"{t!r} is not a point of the time scale")


class EmptyRange(TimeScaleError, ValueError):
    pass


class UnboundedWindowOnly(TimeScaleError, ValueError):
    """Raised when an operation needs sup T = inf but the time scale stops at its window."""


class InvalidTimeScale(TimeScaleError, ValueError):
    pass


class NotRegressive(TimeScaleError, ArithmeticError):
    def __init__(self, message, where=None):
        self.where = where
        super().__init__(message)


class QuadratureFailure(TimeScaleError, ArithmeticError):
    pass


class NoConvergence(TimeScaleError, ArithmeticError):
    pass


class NonDifferentiable(TimeScaleError, ArithmeticError):
    pass


class OutsideRegion(TimeScaleError, ValueError):
    pass


class NonConstantGraininess(TimeScaleError, ValueError):
    pass


class DenseBoundary(TimeScaleError, ValueError):
    pass


class ExprSyntaxError(TimeScaleError, ValueError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class UnknownFunction(ExprSyntaxError):
    pass


class TimeScaleFormatError(TimeScaleError, ValueError):
    def __init__(self, message, line):
        self.line = line
        super().__init__(f"line {line}: {message}")
