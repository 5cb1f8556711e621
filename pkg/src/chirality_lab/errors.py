"""Exception hierarchy shared by every module of the package."""


class ChiralityLabError(Exception):
    pass


class NonPrimeCharacteristic(ChiralityLabError, ValueError):
    pass


class SizeCapExceeded(ChiralityLabError):
    pass


class WrongTower(ChiralityLabError, ValueError):
    pass


class ZeroElement(ChiralityLabError, ZeroDivisionError):
    pass


class SingularMatrix(ChiralityLabError, ZeroDivisionError):
    pass


class DimensionMismatch(ChiralityLabError, ValueError):
    pass


class NotInAmbientGroup(ChiralityLabError, ValueError):
    pass


class WitnessSearchExhausted(ChiralityLabError):
    pass


class BadCharacteristic(ChiralityLabError, ValueError):
    pass


class NotPrimitiveCubeRoot(ChiralityLabError, ValueError):
    pass


class CertificateNotFound(ChiralityLabError):
    pass


class ArityMismatch(ChiralityLabError, ValueError):
    pass


class ArityExceeded(ChiralityLabError, ValueError):
    pass


class ParseError(ChiralityLabError, ValueError):
    """Text could not be parsed; ``position`` is the 0-based offset of the problem."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


# the word grammar calls these syntax errors
WordSyntaxError = ParseError
