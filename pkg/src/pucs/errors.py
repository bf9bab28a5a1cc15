"""Exception hierarchy shared by all modules."""


class PucsError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PucsError, ValueError):
    """Invalid construction parameters (radius <= 0, zero normal, bad override...)."""


class InstanceError(PucsError, ValueError):
    """Incompatible operands, typically a dimension mismatch."""


class UnsupportedSamplingError(PucsError):
    """Uniform sampling was requested from an unbounded piece."""


class BudgetError(PucsError):
    """The number of piece combinations exceeds the configured budget."""


class ProblemParseError(ValidationError):
    """A problem file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = []
        if line is not None:
            where.append(f"line {line}")
        if path:
            where.append(path)
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
