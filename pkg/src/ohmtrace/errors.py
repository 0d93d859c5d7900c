"""Exception types raised across ohmtrace."""


class OhmtraceError(Exception):
    """Base class for all ohmtrace errors."""


class NetworkError(OhmtraceError, ValueError):
    pass


class NonPositiveConductance(NetworkError):
    pass


class SelfLoop(NetworkError):
    pass


class DuplicateEdge(NetworkError):
    pass


class RootDisconnected(NetworkError):
    pass


class UnknownVertex(NetworkError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class EmptyInterior(NetworkError):
    pass


class ParseError(NetworkError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class NetworkIOError(OhmtraceError, OSError):
    pass


class SolverError(OhmtraceError, ArithmeticError):
    pass


class SingularSystem(SolverError):
    pass


class ToleranceNotReached(SolverError):
    pass


class MissingValue(OhmtraceError, ValueError):
    pass


class FlowOffEdge(OhmtraceError, ValueError):
    pass


class NotACutset(OhmtraceError, ValueError):
    pass


class OverlappingCutsets(OhmtraceError, ValueError):
    pass


class TOutOfRange(OhmtraceError, ValueError):
    pass


class IsolatedVertex(OhmtraceError, ValueError):
    pass


class EmptyTrace(OhmtraceError, ValueError):
    pass


class FormulaMismatch(OhmtraceError, ArithmeticError):
    pass


class NotStraddling(OhmtraceError, ValueError):
    pass


class DivisionByZeroVoltageGap(OhmtraceError, ZeroDivisionError):
    pass


class AllEdgesVanished(OhmtraceError, ValueError):
    pass


class RootIsolated(OhmtraceError, ValueError):
    pass


class EdgeSetMismatch(OhmtraceError, ValueError):
    pass


class ConfigError(OhmtraceError, ValueError):
    pass


class MNotReached(OhmtraceError):
    pass
