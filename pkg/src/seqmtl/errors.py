"""Exception hierarchy shared across the package."""


class SeqMTLError(Exception):
    """Base class for all package errors."""


class ShapeError(SeqMTLError, ValueError):
    """Operand shapes are incompatible with an operation."""


class NumericError(SeqMTLError, ArithmeticError):
    """A forward value or loss became NaN or infinite."""


class ContractError(SeqMTLError, ValueError):
    """A precondition of an operation was violated."""


class ConfigError(SeqMTLError, ValueError):
    """Invalid configuration or sharing plan."""


class DataError(SeqMTLError, ValueError):
    """Malformed or missing input data."""


class ParseError(DataError):
    """A linearized sequence could not be parsed back into a structure."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at token {position})"
        super().__init__(message)
        self.position = position
