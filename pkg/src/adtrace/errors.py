"""Exception types shared across the package."""


class AdError(Exception):
    """Base class for every error raised by adtrace."""


class DomainError(AdError, ArithmeticError):
    """An elementary operation was applied outside its domain.

    ``node`` is the tape index of the offending node when the failure happened
    during a sweep, otherwise ``None``.
    """

    def __init__(self, message, node=None, op=None):
        self.node = node
        self.op = op
        if node is not None:
            where = f"node {node}" + (f" ({op})" if op else "")
            message = f"{message} at {where}"
        super().__init__(message)


class ArityError(AdError, ValueError):
    pass


class TapeError(AdError, ValueError):
    """Malformed tape or a sweep requested out of order."""


class DimensionError(AdError, ValueError):
    pass


class ParseError(AdError):
    """Lexical, syntax or static-check failure, with a source span."""

    def __init__(self, message, span):
        self.span = span
        self.offset = span.start
        super().__init__(f"{message} (at offset {span.start})")
