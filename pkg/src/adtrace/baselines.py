"""Non-AD derivatives used for contrast and as test oracles.

* Finite differences (forward or central), whose error is a sum of a
  truncation term that shrinks with the step and a round-off term that grows
  as the step shrinks.
* A naive symbolic differentiator over the expression tree. Its simplifier is
  deliberately minimal so that the growth of derivative expressions stays
  visible.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .dual import pow_value
from .elementary import FUNCTIONS
from .errors import AdError, DomainError
from .lang.ast import BinOp, Call, Name, Neg, Num, children

EPS = sys.float_info.epsilon


class UnboundVariable(AdError, LookupError):
    pass


@dataclass(frozen=True)
class FdConfig:
    step: Union[float, str] = "auto"
    scheme: str = "central"  # or "forward"

    def __post_init__(self):
        if self.scheme not in ("central", "forward"):
            raise ValueError(f"unknown finite-difference scheme {self.scheme!r}")
        if self.step != "auto" and not (float(self.step) > 0.0):
            raise ValueError("finite-difference step must be positive")

    def step_for(self, x: float) -> float:
        if self.step != "auto":
            return float(self.step)
        base = EPS ** (1.0 / 3.0) if self.scheme == "central" else math.sqrt(EPS)
        return base * max(1.0, abs(x))


def _vector(fx):
    if isinstance(fx, (list, tuple, np.ndarray)):
        return np.asarray(fx, dtype=np.float64)
    return np.asarray([fx], dtype=np.float64)


def fd_jacobian(f: Callable, inputs: Sequence[float], config: FdConfig = FdConfig()) -> np.ndarray:
    """m x n finite-difference Jacobian of ``f`` (list of n floats -> scalar or sequence)."""
    x = np.asarray(inputs, dtype=np.float64)
    n = x.shape[0]

    def call(point):
        try:
            return _vector(f(list(point)))
        except DomainError as exc:
            raise DomainError(f"finite-difference probe left the domain: {exc}") from None

    f0 = call(x) if config.scheme == "forward" else None
    cols = []
    for i in range(n):
        h = config.step_for(x[i])
        xp = x.copy()
        xp[i] += h
        if config.scheme == "forward":
            cols.append((call(xp) - f0) / h)
        else:
            xm = x.copy()
            xm[i] -= h
            cols.append((call(xp) - call(xm)) / (2.0 * h))
    if not cols:
        return np.zeros((len(call(x)), 0))
    return np.stack(cols, axis=1)


def fd_gradient(f: Callable, inputs: Sequence[float], config: FdConfig = FdConfig()) -> list[float]:
    jac = fd_jacobian(f, inputs, config)
    if jac.shape[0] != 1:
        raise ValueError("fd_gradient needs a scalar function")
    return jac[0].tolist()


def fd_error_curve(f: Callable, df: float, x: float, steps: Sequence[float], scheme: str = "central"):
    """Absolute error of the finite-difference derivative of a 1-D ``f`` for each step."""
    out = []
    for h in steps:
        approx = fd_gradient(lambda p: f(p[0]), [x], FdConfig(step=h, scheme=scheme))[0]
        out.append(abs(approx - df))
    return out


# symbolic differentiation --------------------------------------------------

def _is_num(e, value=None):
    return isinstance(e, Num) and (value is None or e.value == value)


def _fold(op, a, b):
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0.0:
                return None
            return a / b
        return pow_value(a, b)
    except (DomainError, OverflowError):
        return None


def make_binop(op, a, b, simplify=False):
    """Build ``a op b`` applying the minimal identities (more with ``simplify``)."""
    if isinstance(a, Num) and isinstance(b, Num):
        folded = _fold(op, a.value, b.value)
        if folded is not None and math.isfinite(folded):
            return Num(folded)
    if op == "+":
        if _is_num(a, 0.0):
            return b
        if _is_num(b, 0.0):
            return a
    elif op == "*":
        if _is_num(a, 0.0) or _is_num(b, 0.0):
            return Num(0.0)
        if _is_num(a, 1.0):
            return b
        if _is_num(b, 1.0):
            return a
    elif op == "^":
        if _is_num(b, 1.0):
            return a
    if simplify:
        if op == "-":
            if _is_num(b, 0.0):
                return a
            if _is_num(a, 0.0):
                return make_neg(b, simplify)
            if a == b:
                return Num(0.0)
        elif op == "/":
            if _is_num(b, 1.0):
                return a
            if _is_num(a, 0.0):
                return Num(0.0)
        elif op == "^" and _is_num(b, 0.0):
            return Num(1.0)
        elif op == "*":
            if _is_num(a, -1.0):
                return make_neg(b, simplify)
            if _is_num(b, -1.0):
                return make_neg(a, simplify)
        elif op == "+" and a == b:
            return make_binop("*", Num(2.0), a, simplify)
    return BinOp(op, a, b)


def make_neg(a, simplify=False):
    if isinstance(a, Num):
        return Num(-a.value)
    if simplify and isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _contains(e, var) -> bool:
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Name) and node.id == var:
            return True
        stack.extend(children(node))
    return False


def sym_diff(expr, var: str, simplify: bool = False):
    """Exact symbolic derivative of ``expr`` with respect to ``var``.

    Purely structural: variables never need values. Only constant folding and
    ``0*e -> 0``, ``0+e -> e``, ``1*e -> e``, ``e^1 -> e`` (and their mirror
    images) are applied unless ``simplify`` is set.
    """
    B = lambda op, a, b: make_binop(op, a, b, simplify)  # noqa: E731
    N = lambda a: make_neg(a, simplify)  # noqa: E731

    def d(e):
        if isinstance(e, Num):
            return Num(0.0)
        if isinstance(e, Name):
            return Num(1.0 if e.id == var else 0.0)
        if isinstance(e, Neg):
            return N(d(e.arg))
        if isinstance(e, BinOp):
            u, w = e.left, e.right
            if e.op in "+-":
                return B(e.op, d(u), d(w))
            if e.op == "*":
                return B("+", B("*", d(u), w), B("*", u, d(w)))
            if e.op == "/":
                num = B("-", B("*", d(u), w), B("*", u, d(w)))
                return B("/", num, B("^", w, Num(2.0)))
            # power
            if not _contains(w, var):
                return B("*", B("*", w, B("^", u, B("-", w, Num(1.0)))), d(u))
            if not _contains(u, var):
                return B("*", B("*", e, Call("ln", u)), d(w))
            inner = B("+", B("*", d(w), Call("ln", u)), B("/", B("*", w, d(u)), u))
            return B("*", e, inner)
        if isinstance(e, Call):
            u = e.arg
            du = d(u)
            f = e.func
            if f == "ln":
                return B("/", du, u)
            if f == "exp":
                return B("*", e, du)
            if f == "sin":
                return B("*", Call("cos", u), du)
            if f == "cos":
                return B("*", N(Call("sin", u)), du)
            if f == "tan":
                return B("*", B("+", Num(1.0), B("^", e, Num(2.0))), du)
            if f == "sqrt":
                return B("/", du, B("*", Num(2.0), e))
            raise AdError(f"unsupported function {f!r}")
        raise AdError(f"unsupported expression node {type(e).__name__}")

    return d(expr)


def sym_eval(expr, bindings: Mapping[str, float]) -> float:
    """Numeric value of ``expr``; every free variable must be bound."""
    vals: dict[int, float] = {}
    stack = [(expr, False)]
    while stack:
        node, ready = stack.pop()
        if isinstance(node, Num):
            vals[id(node)] = node.value
            continue
        if isinstance(node, Name):
            if node.id not in bindings:
                raise UnboundVariable(f"unbound variable {node.id!r}")
            vals[id(node)] = float(bindings[node.id])
            continue
        if not ready:
            stack.append((node, True))
            stack.extend((k, False) for k in children(node))
            continue
        if isinstance(node, Neg):
            vals[id(node)] = -vals[id(node.arg)]
        elif isinstance(node, Call):
            vals[id(node)] = FUNCTIONS[node.func](vals[id(node.arg)])
        else:
            a, b = vals[id(node.left)], vals[id(node.right)]
            if node.op == "/" and b == 0.0:
                raise DomainError("division by zero")
            if node.op == "^":
                vals[id(node)] = pow_value(a, b)
            else:
                vals[id(node)] = _fold(node.op, a, b)
    return vals[id(expr)]


def product_chain(k: int, var: str = "x"):
    """sin(1*x) * sin(2*x) * ... * sin(k*x), left-nested."""
    factors = [Call("sin", BinOp("*", Num(float(i)), Name(var))) for i in range(1, k + 1)]
    e = factors[0]
    for f in factors[1:]:
        e = BinOp("*", e, f)
    return e


def swell_rows(max_k: int, simplify: bool = False):
    """(k, size of the expression, size of its symbolic derivative, tape length) for k = 2..max_k."""
    from .lang.ast import Program, size
    from .lang.tracer import trace

    rows = []
    for k in range(2, max_k + 1):
        e = product_chain(k)
        tape = trace(Program(("x",), (), (e,)), [0.5])
        rows.append((k, size(e), size(sym_diff(e, "x", simplify)), len(tape)))
    return rows
