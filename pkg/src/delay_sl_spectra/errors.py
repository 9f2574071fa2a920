"""Exception hierarchy shared by all modules."""


class DelaySLError(Exception):
    """Base class for every error raised by this package."""


# -- problem validation ------------------------------------------------------

class ValidationError(DelaySLError, ValueError):
    pass


class ConstraintViolation(ValidationError):
    """The coupling identity gamma1*delta2*p1 == gamma2*delta1*p2 fails."""


class DegenerateTransmission(ValidationError):
    pass


class NonpositiveStiffness(ValidationError):
    pass


# -- expressions -------------------------------------------------------------

class ExpressionError(DelaySLError, ValueError):
    pass


class MalformedExpression(ExpressionError):
    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UnknownIdentifier(ExpressionError):
    def __init__(self, name, position):
        super().__init__(f"unknown identifier {name!r} at offset {position}")
        self.name = name
        self.position = position


class DomainError(ExpressionError, ArithmeticError):
    pass


class ExpressionEvalError(ExpressionError):
    pass


# -- numerics ----------------------------------------------------------------

class NumericError(DelaySLError, ArithmeticError):
    pass


class DelayOutOfRange(NumericError):
    pass


class NonfiniteState(NumericError):
    pass


class OutOfDomain(NumericError, ValueError):
    pass


class SpectralError(NumericError):
    pass


class NoRootInWindow(SpectralError):
    pass


class MultipleRootsInWindow(SpectralError):
    pass


class InvalidWindow(SpectralError):
    """Search window reaches s <= 0, where the asymptotic indexing is void."""


class DegenerateFit(NumericError):
    pass


# -- harness -----------------------------------------------------------------

class ConfigError(DelaySLError, ValueError):
    pass
