"""Dual numbers for forward accumulation.

A :class:`Dual` carries a primal value and a tangent. Arithmetic on duals
applies the chain rule one elementary operation at a time, so evaluating any
Python function built from ``+ - * / **`` and the functions in
:mod:`adtrace.elementary` on dual inputs yields a directional derivative.
"""

from __future__ import annotations

import math

from .errors import DomainError


def _check_scalar(x, what):
    if isinstance(x, Dual):
        raise TypeError(
            f"Dual {what} is itself a Dual; nested tangents are not supported "
            "(only one level of forward-over-reverse nesting is implemented)"
        )
    if not isinstance(x, (int, float)):
        # Tracing variables and other overloaded scalars cannot live inside a Dual.
        if isinstance(x, (str, bytes)):
            raise TypeError(f"Dual {what} must be a real number, got {type(x).__name__}")
        try:
            return float(x)
        except TypeError:
            raise TypeError(f"Dual {what} must be a real number, got {type(x).__name__}") from None
    return float(x)


def pow_base_term(a, c, ta):
    """Tangent contribution of the base in ``a ** c``.

    Handles the zero base explicitly so that ``0 ** 1`` and ``0 ** 2`` have
    their finite derivatives instead of ``0 * inf``.
    """
    if a == 0.0:
        if c == 0.0:
            return 0.0
        if c == 1.0:
            return ta
        if c > 1.0:
            return 0.0
        raise DomainError("pow: infinite derivative at zero base")
    return c * a ** (c - 1.0) * ta


def pow_value(a, c):
    if a == 0.0 and c < 0.0:
        raise DomainError("pow: zero raised to a negative power")
    if a < 0.0 and c != math.floor(c):
        raise DomainError("pow: negative base with non-integer exponent")
    return a ** c


def log_or_zero(a):
    # The exponent partial a**c * ln(a) only exists for a positive base; for a <= 0
    # the exponent is forced integral and we record zero.
    return math.log(a) if a > 0.0 else 0.0


class Dual:
    """Primal value paired with a tangent (``v`` and ``v_dot``)."""

    __slots__ = ("primal", "tangent")

    def __init__(self, primal, tangent=0.0):
        self.primal = _check_scalar(primal, "primal")
        self.tangent = _check_scalar(tangent, "tangent")

    def __repr__(self):
        return f"Dual({self.primal!r}, {self.tangent!r})"

    def __eq__(self, other):
        if isinstance(other, Dual):
            return self.primal == other.primal and self.tangent == other.tangent
        return NotImplemented

    __hash__ = None

    @staticmethod
    def _lift(x):
        if isinstance(x, Dual):
            return x
        if isinstance(x, (int, float)):
            return Dual(x, 0.0)
        return NotImplemented

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Dual(self.primal + o.primal, self.tangent + o.tangent)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Dual(self.primal - o.primal, self.tangent - o.tangent)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Dual(
            self.primal * o.primal,
            self.tangent * o.primal + self.primal * o.tangent,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if o.primal == 0.0:
            raise DomainError("division by zero")
        q = self.primal / o.primal
        return Dual(q, (self.tangent - q * o.tangent) / o.primal)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return Dual(-self.primal, -self.tangent)

    def __pos__(self):
        return self

    def __pow__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        a, c = self.primal, o.primal
        y = pow_value(a, c)
        t = pow_base_term(a, c, self.tangent)
        if o.tangent != 0.0 and a > 0.0:
            t += y * math.log(a) * o.tangent
        return Dual(y, t)

    def __rpow__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o ** self

    # comparisons act on the primal, as a traced branch would
    def __lt__(self, other):
        return self.primal < _primal(other)

    def __le__(self, other):
        return self.primal <= _primal(other)

    def __gt__(self, other):
        return self.primal > _primal(other)

    def __ge__(self, other):
        return self.primal >= _primal(other)

    # elementary functions ---------------------------------------------
    def ln(self):
        if self.primal <= 0.0:
            raise DomainError("ln of a non-positive number")
        return Dual(math.log(self.primal), self.tangent / self.primal)

    def exp(self):
        y = math.exp(self.primal)
        return Dual(y, y * self.tangent)

    def sin(self):
        return Dual(math.sin(self.primal), math.cos(self.primal) * self.tangent)

    def cos(self):
        return Dual(math.cos(self.primal), -math.sin(self.primal) * self.tangent)

    def tan(self):
        y = math.tan(self.primal)
        return Dual(y, (1.0 + y * y) * self.tangent)

    def sqrt(self):
        if self.primal <= 0.0:
            raise DomainError("sqrt of a non-positive number has no finite derivative")
        y = math.sqrt(self.primal)
        return Dual(y, 0.5 * self.tangent / y)


def _primal(x):
    return x.primal if isinstance(x, Dual) else x
