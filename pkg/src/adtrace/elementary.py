"""Elementary functions that work on floats, :class:`Dual` and traced variables.

Anything with a method of the same name (``x.sin()``) gets it called; plain
numbers go through :mod:`math` with the same domain rules the tape uses.
"""

import math

from .errors import DomainError

__all__ = ["ln", "exp", "sin", "cos", "tan", "sqrt", "FUNCTIONS"]


def _float_ln(x):
    if x <= 0.0:
        raise DomainError("ln of a non-positive number")
    return math.log(x)


def _float_sqrt(x):
    if x < 0.0:
        raise DomainError("sqrt of a negative number")
    return math.sqrt(x)


def _float_exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        raise DomainError("exp overflow") from None


def _dispatch(name, fallback):
    def fn(x):
        method = getattr(x, name, None)
        if method is not None:
            return method()
        return fallback(float(x))

    fn.__name__ = name
    fn.__qualname__ = name
    return fn


ln = _dispatch("ln", _float_ln)
exp = _dispatch("exp", _float_exp)
sin = _dispatch("sin", math.sin)
cos = _dispatch("cos", math.cos)
tan = _dispatch("tan", math.tan)
sqrt = _dispatch("sqrt", _float_sqrt)

FUNCTIONS = {"ln": ln, "exp": exp, "sin": sin, "cos": cos, "tan": tan, "sqrt": sqrt}
