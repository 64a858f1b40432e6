"""Exception hierarchy shared by every module."""


class MplError(Exception):
    """Base class for all errors raised by mplcheck."""


class DimensionMismatch(MplError, ValueError):
    pass


class NotRegular(MplError, ValueError):
    pass


class NotIrreducible(MplError, ValueError):
    pass


class NoCircuit(MplError, ValueError):
    pass


class ParseError(MplError, ValueError):
    """Text input could not be parsed; carries a 1-based position."""

    def __init__(self, message, line=None, column=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            where = f" ({where})"
        prefix = f"{source}: " if source else ""
        super().__init__(f"{prefix}{message}{where}")


class MatrixParseError(ParseError):
    pass


class FormulaSyntaxError(ParseError):
    pass


class IndexOutOfRange(MplError, ValueError):
    pass


class HorizonTooShort(MplError, ValueError):
    pass


class EpsilonOperand(MplError, ValueError):
    pass


class NotALasso(MplError, ValueError):
    pass


class NoThreshold(MplError, RuntimeError):
    pass


class SolverError(MplError, RuntimeError):
    pass


class SolverCrashed(SolverError):
    pass


class ProtocolError(SolverError):
    pass


class SolverTimeout(SolverError):
    pass


class CheckerUnavailable(MplError, RuntimeError):
    pass


class TraceParseError(ParseError):
    pass


class SmvSyntaxError(ParseError):
    pass


class InfeasibleParams(MplError, ValueError):
    pass
