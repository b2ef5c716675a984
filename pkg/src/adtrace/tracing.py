"""Operator-overloading front end: build a tape by running ordinary code.

Arithmetic on :class:`Var` appends a node to the tape and evaluates it at
once, so Python control flow sees real numbers and only the path actually
taken ends up on the tape. Values that never touch a ``Var`` stay plain floats
and are folded at trace time; they enter the tape as ``CONST`` nodes only when
combined with a traced value.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .dual import Dual
from .elementary import FUNCTIONS
from .errors import DimensionError, DomainError
from .tape import Op, Tape, apply_op


class Var:
    __slots__ = ("tape", "index")

    def __init__(self, tape: Tape, index: int):
        self.tape = tape
        self.index = index

    @property
    def value(self) -> float:
        return self.tape.nodes[self.index].value

    def __repr__(self):
        return f"Var(v{self.index - self.tape.num_inputs + 1}={self.value!r})"

    def __float__(self):
        return float(self.value)

    def _node(self, other) -> int:
        if isinstance(other, Var):
            if other.tape is not self.tape:
                raise ValueError("cannot mix variables from different tapes")
            return other.index
        if isinstance(other, Dual):
            raise TypeError("Dual values cannot be combined with traced variables")
        i = self.tape.record(Op.CONST, (), const=float(other))
        self.tape.evaluate_node(i)
        return i

    def _emit(self, op: Op, *parents: int) -> "Var":
        i = self.tape.record(op, parents)
        self.tape.evaluate_node(i)
        return Var(self.tape, i)

    def _binary(self, op, other, reflected=False):
        if not isinstance(other, (Var, int, float)):
            return NotImplemented
        o = self._node(other)
        return self._emit(op, o, self.index) if reflected else self._emit(op, self.index, o)

    def __add__(self, other):
        return self._binary(Op.ADD, other)

    def __radd__(self, other):
        return self._binary(Op.ADD, other, reflected=True)

    def __sub__(self, other):
        return self._binary(Op.SUB, other)

    def __rsub__(self, other):
        return self._binary(Op.SUB, other, reflected=True)

    def __mul__(self, other):
        return self._binary(Op.MUL, other)

    def __rmul__(self, other):
        return self._binary(Op.MUL, other, reflected=True)

    def __truediv__(self, other):
        return self._binary(Op.DIV, other)

    def __rtruediv__(self, other):
        return self._binary(Op.DIV, other, reflected=True)

    def __pow__(self, other):
        return self._binary(Op.POW, other)

    def __rpow__(self, other):
        return self._binary(Op.POW, other, reflected=True)

    def __neg__(self):
        return self._emit(Op.NEG, self.index)

    def __pos__(self):
        return self

    def _compare(self, other):
        a = self.value
        b = other.value if isinstance(other, Var) else float(other)
        if a - a != 0.0 or b - b != 0.0:
            raise DomainError("comparison on a non-finite value")
        return a, b

    def __lt__(self, other):
        a, b = self._compare(other)
        return a < b

    def __le__(self, other):
        a, b = self._compare(other)
        return a <= b

    def __gt__(self, other):
        a, b = self._compare(other)
        return a > b

    def __ge__(self, other):
        a, b = self._compare(other)
        return a >= b

    def ln(self):
        return self._emit(Op.LN, self.index)

    def exp(self):
        return self._emit(Op.EXP, self.index)

    def sin(self):
        return self._emit(Op.SIN, self.index)

    def cos(self):
        return self._emit(Op.COS, self.index)

    def tan(self):
        return self._emit(Op.TAN, self.index)

    def sqrt(self):
        return self._emit(Op.SQRT, self.index)


def binary(op: Op, a, b):
    """Apply a binary op to any mix of floats and vars (used by the language tracer)."""
    if isinstance(a, Var) or isinstance(b, Var):
        fn = {Op.ADD: "__add__", Op.SUB: "__sub__", Op.MUL: "__mul__", Op.DIV: "__truediv__", Op.POW: "__pow__"}[op]
        if isinstance(a, Var):
            return getattr(a, fn)(b)
        return getattr(b, "__r" + fn[2:])(a)
    return apply_op(op, (float(a), float(b)))


def unary(name: str, a):
    if name == "neg":
        return -a
    return FUNCTIONS[name](a)


def trace_callable(fn: Callable, inputs: Sequence[float], names: Sequence[str] | None = None) -> Tape:
    """Run ``fn`` on traced inputs and return the resulting tape.

    ``fn`` receives one :class:`Var` per input and returns a scalar or a
    sequence of scalars (the outputs). Constant outputs are recorded as
    ``CONST`` nodes.
    """
    tape = Tape(names)
    xs = []
    for x in inputs:
        i = tape.record(Op.INPUT)
        tape.evaluate_node(i, float(x))
        xs.append(Var(tape, i))
    out = fn(*xs)
    if not isinstance(out, (list, tuple)):
        out = [out]
    if not out:
        raise DimensionError("function returned no outputs")
    for y in out:
        tape.mark_output(as_node(tape, y))
    return tape


def as_node(tape: Tape, y) -> int:
    if isinstance(y, Var):
        if y.tape is not tape:
            raise ValueError("output belongs to a different tape")
        return y.index
    i = tape.record(Op.CONST, (), const=float(y))
    tape.evaluate_node(i)
    return i


class TracedFunction:
    """A function that can be re-traced at any point.

    Wraps either a Python callable over :class:`Var` arguments or a parsed
    program; :meth:`trace` produces a fresh tape at the given inputs so that
    data-dependent branches are re-resolved every time.
    """

    def __init__(self, fn: Callable, params: Sequence[str]):
        self.fn = fn
        self.params = list(params)

    @classmethod
    def from_callable(cls, fn: Callable, n_inputs: int, names: Sequence[str] | None = None):
        names = list(names) if names is not None else [f"x{i + 1}" for i in range(n_inputs)]
        if len(names) != n_inputs:
            raise DimensionError("one name per input required")
        return cls(fn, names)

    @classmethod
    def from_source(cls, source: str):
        from .lang.parser import parse
        from .lang.tracer import program_function

        return program_function(parse(source))

    @property
    def n_inputs(self):
        return len(self.params)

    def trace(self, inputs: Sequence[float]) -> Tape:
        if len(inputs) != len(self.params):
            raise DimensionError(f"expected {len(self.params)} inputs, got {len(inputs)}")
        return trace_callable(self.fn, inputs, self.params)

    def __call__(self, inputs: Sequence[float]) -> list[float]:
        tape = self.trace(inputs)
        return [tape.nodes[j].value for j in tape.output_indices]
