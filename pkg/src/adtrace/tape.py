"""Evaluation trace (Wengert list) and the forward evaluation sweep.

Nodes are numbered densely from 0. The first ``num_inputs`` nodes are the
inputs; printing helpers translate index ``i`` into the conventional label
``v[i - num_inputs + 1]`` so that inputs read ``v[-1], v[0]`` for two inputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import kernels
from .dual import Dual, pow_value
from .elementary import cos, exp, ln, sin, sqrt, tan
from .errors import ArityError, DomainError, TapeError


class Op(enum.IntEnum):
    ADD = kernels.ADD
    SUB = kernels.SUB
    MUL = kernels.MUL
    DIV = kernels.DIV
    NEG = kernels.NEG
    POW = kernels.POW
    LN = kernels.LN
    EXP = kernels.EXP
    SIN = kernels.SIN
    COS = kernels.COS
    TAN = kernels.TAN
    SQRT = kernels.SQRT
    CONST = kernels.CONST
    INPUT = kernels.INPUT

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def symbol(self) -> str:
        return _SYMBOL[self]


_ARITY = {
    Op.ADD: 2, Op.SUB: 2, Op.MUL: 2, Op.DIV: 2, Op.POW: 2,
    Op.NEG: 1, Op.LN: 1, Op.EXP: 1, Op.SIN: 1, Op.COS: 1, Op.TAN: 1, Op.SQRT: 1,
    Op.CONST: 0, Op.INPUT: 0,
}
_SYMBOL = {
    Op.ADD: "+", Op.SUB: "-", Op.MUL: "*", Op.DIV: "/", Op.POW: "^", Op.NEG: "-",
    Op.LN: "ln", Op.EXP: "exp", Op.SIN: "sin", Op.COS: "cos", Op.TAN: "tan",
    Op.SQRT: "sqrt", Op.CONST: "const", Op.INPUT: "input",
}
BINARY_OPS = {"+": Op.ADD, "-": Op.SUB, "*": Op.MUL, "/": Op.DIV, "^": Op.POW}
UNARY_FUNCS = {"ln": Op.LN, "exp": Op.EXP, "sin": Op.SIN, "cos": Op.COS, "tan": Op.TAN, "sqrt": Op.SQRT}


@dataclass
class OpCounter:
    """Tally of scalar-level operations performed by sweeps.

    One primal op per evaluated working node, one tangent op per parent edge
    in a tangent sweep, one adjoint op per parent edge in a reverse sweep. The
    unit is the same whatever the scalar type, so a reverse sweep over duals
    counts one adjoint op per edge, like a plain one.
    """

    primal_ops: int = 0
    tangent_ops: int = 0
    adjoint_ops: int = 0

    def reset(self):
        self.primal_ops = self.tangent_ops = self.adjoint_ops = 0

    def snapshot(self):
        return OpCounter(self.primal_ops, self.tangent_ops, self.adjoint_ops)

    def __sub__(self, other):
        return OpCounter(
            self.primal_ops - other.primal_ops,
            self.tangent_ops - other.tangent_ops,
            self.adjoint_ops - other.adjoint_ops,
        )


@dataclass
class TraceNode:
    op: Op
    parents: tuple[int, ...]
    value: Any = None
    partials: tuple = ()
    const: float = 0.0


@dataclass
class TapeArrays:
    """Struct-of-arrays view of a tape, as consumed by :mod:`adtrace.kernels`."""

    op: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    const: np.ndarray
    num_inputs: int
    outputs: np.ndarray

    @property
    def size(self):
        return self.op.shape[0]


def _primal(x):
    return x.primal if isinstance(x, Dual) else x


def zero_base_partial(b):
    """Base partial of ``0 ** b`` (finite cases only)."""
    if b == 0.0 or b > 1.0:
        return 0.0
    if b == 1.0:
        return 1.0
    raise DomainError("pow: infinite derivative at zero base")


def apply_op(op: Op, args: Sequence):
    """Evaluate one elementary op on floats or duals."""
    if op is Op.ADD:
        return args[0] + args[1]
    if op is Op.SUB:
        return args[0] - args[1]
    if op is Op.MUL:
        return args[0] * args[1]
    if op is Op.DIV:
        if _primal(args[1]) == 0.0:
            raise DomainError("division by zero")
        return args[0] / args[1]
    if op is Op.NEG:
        return -args[0]
    if op is Op.POW:
        a, b = args
        if isinstance(a, Dual) or isinstance(b, Dual):
            return Dual._lift(a) ** b
        return pow_value(float(a), float(b))
    if op is Op.LN:
        return ln(args[0])
    if op is Op.EXP:
        return exp(args[0])
    if op is Op.SIN:
        return sin(args[0])
    if op is Op.COS:
        return cos(args[0])
    if op is Op.TAN:
        return tan(args[0])
    if op is Op.SQRT:
        if _primal(args[0]) == 0.0:
            raise DomainError("sqrt at zero has no finite derivative")
        return sqrt(args[0])
    raise TapeError(f"{op.name} has no evaluation rule")


def local_partials(op: Op, parent_values: Sequence, value) -> tuple:
    """Partial derivatives of one node with respect to each of its parents.

    Works on floats and on :class:`Dual` values; in the latter case the
    tangents of the partials come out as well, which is what a reverse sweep
    over duals needs.
    """
    op = Op(op)
    if len(parent_values) != op.arity:
        raise ArityError(f"{op.name} takes {op.arity} parent values, got {len(parent_values)}")
    if op is Op.ADD:
        return (1.0, 1.0)
    if op is Op.SUB:
        return (1.0, -1.0)
    if op is Op.MUL:
        a, b = parent_values
        return (b, a)
    if op is Op.DIV:
        b = parent_values[1]
        if _primal(b) == 0.0:
            raise DomainError("division by zero")
        return (1.0 / b, -value / b)
    if op is Op.NEG:
        return (-1.0,)
    if op is Op.POW:
        a, b = parent_values
        a0 = _primal(a)
        if a0 == 0.0:
            d0 = zero_base_partial(_primal(b))
            if isinstance(a, Dual) or isinstance(b, Dual):
                ta = a.tangent if isinstance(a, Dual) else 0.0
                tb = b.tangent if isinstance(b, Dual) else 0.0
                second = kernels.zero_base_second(_primal(b), ta, tb)
                if second != second:
                    raise DomainError("pow: infinite second derivative at zero base")
                d0 = Dual(d0, second)
            return (d0, 0.0)
        d0 = b * _pow(a, b - 1.0)
        d1 = value * ln(a) if a0 > 0.0 else 0.0
        return (d0, d1)
    if op is Op.LN:
        a = parent_values[0]
        if _primal(a) <= 0.0:
            raise DomainError("ln partial outside (0, inf)")
        return (1.0 / a,)
    if op is Op.EXP:
        return (value,)
    if op is Op.SIN:
        return (cos(parent_values[0]),)
    if op is Op.COS:
        return (-sin(parent_values[0]),)
    if op is Op.TAN:
        return (1.0 + value * value,)
    if op is Op.SQRT:
        if _primal(value) == 0.0:
            raise DomainError("sqrt at zero has no finite derivative")
        return (0.5 / value,)
    return ()


def _pow(a, c):
    if isinstance(a, Dual) or isinstance(c, Dual):
        return Dual._lift(a) ** c
    return pow_value(a, c)


def _finite(x):
    p = _primal(x)
    t = x.tangent if isinstance(x, Dual) else 0.0
    return p - p == 0.0 and t - t == 0.0


class Tape:
    """Append-only Wengert list.

    ``record`` appends an unevaluated node; ``forward_sweep`` (or
    :meth:`evaluate_node` during tracing) fills in values and local partials.
    """

    def __init__(self, input_names: Sequence[str] | None = None):
        self.nodes: list[TraceNode] = []
        self.num_inputs = 0
        self.output_indices: list[int] = []
        self.input_names = list(input_names) if input_names is not None else None
        self.counter = OpCounter()
        self._arrays: TapeArrays | None = None

    def __len__(self):
        return len(self.nodes)

    def __repr__(self):
        return f"<Tape nodes={len(self.nodes)} inputs={self.num_inputs} outputs={self.output_indices}>"

    @property
    def num_outputs(self):
        return len(self.output_indices)

    def record(self, op, parents: Sequence[int] = (), const: float | None = None) -> int:
        op = Op(op)
        parents = tuple(int(p) for p in parents)
        if len(parents) != op.arity:
            raise ArityError(f"{op.name} takes {op.arity} parents, got {len(parents)}")
        n = len(self.nodes)
        for p in parents:
            if not 0 <= p < n:
                raise TapeError(f"parent index {p} out of range for new node {n}")
        if op is Op.INPUT:
            if self.num_inputs != n:
                raise TapeError("input nodes must precede all other nodes")
            self.num_inputs += 1
        if op is Op.CONST:
            if const is None:
                raise TapeError("CONST node needs a value")
            node = TraceNode(op, parents, const=float(const))
        else:
            node = TraceNode(op, parents)
        self.nodes.append(node)
        self._arrays = None
        return n

    def mark_output(self, index: int):
        if not 0 <= index < len(self.nodes):
            raise TapeError(f"output index {index} out of range")
        self.output_indices.append(index)

    def set_outputs(self, indices: Sequence[int]):
        self.output_indices = []
        for i in indices:
            self.mark_output(i)

    def evaluate_node(self, i: int, input_value=None):
        """Populate the value and partials of node ``i`` from its parents."""
        node = self.nodes[i]
        if node.op is Op.INPUT:
            node.value = input_value
            node.partials = ()
            return node.value
        if node.op is Op.CONST:
            node.value = node.const
            node.partials = ()
            return node.value
        args = []
        for p in node.parents:
            v = self.nodes[p].value
            if v is None:
                raise TapeError(f"node {i} reads unevaluated node {p}")
            args.append(v)
        try:
            value = apply_op(node.op, args)
            partials = local_partials(node.op, args, value)
        except DomainError as exc:
            raise DomainError(str(exc), node=i, op=node.op.name) from None
        except (OverflowError, ZeroDivisionError, ValueError) as exc:
            raise DomainError(str(exc), node=i, op=node.op.name) from None
        if not (_finite(value) and all(_finite(d) for d in partials)):
            raise DomainError("non-finite result", node=i, op=node.op.name)
        node.value = value
        node.partials = partials
        self.counter.primal_ops += 1
        return value

    @property
    def is_evaluated(self):
        return bool(self.nodes) and all(n.value is not None for n in self.nodes)

    def working_count(self):
        arr = self.arrays()
        return arr.size - int(np.count_nonzero(arr.op >= Op.CONST))

    def edge_count(self):
        arr = self.arrays()
        return int(np.count_nonzero(arr.p0 >= 0) + np.count_nonzero(arr.p1 >= 0))

    def arrays(self) -> TapeArrays:
        if self._arrays is None:
            m = len(self.nodes)
            op = np.empty(m, dtype=np.int64)
            p0 = np.full(m, -1, dtype=np.int64)
            p1 = np.full(m, -1, dtype=np.int64)
            const = np.zeros(m)
            for i, node in enumerate(self.nodes):
                op[i] = int(node.op)
                if node.parents:
                    p0[i] = node.parents[0]
                    if len(node.parents) > 1:
                        p1[i] = node.parents[1]
                const[i] = node.const
            self._arrays = TapeArrays(
                op, p0, p1, const, self.num_inputs,
                np.asarray(self.output_indices, dtype=np.int64),
            )
        return self._arrays

    def label(self, i: int) -> str:
        """Conventional ``v`` label of node ``i``."""
        return f"v{i - self.num_inputs + 1}"

    def input_name(self, k: int) -> str:
        if self.input_names is not None and k < len(self.input_names):
            return self.input_names[k]
        return f"x{k + 1}"


def tape_record(tape: Tape, op, parents: Sequence[int] = (), const: float | None = None) -> int:
    return tape.record(op, parents, const)


def _check_inputs(tape: Tape, inputs):
    if len(inputs) != tape.num_inputs:
        raise TapeError(f"expected {tape.num_inputs} inputs, got {len(inputs)}")
    if not tape.output_indices:
        raise TapeError("tape has no outputs")


def forward_sweep(tape: Tape, inputs: Sequence) -> list:
    """Evaluate every node in index order; return the output values.

    Inputs may be floats or :class:`Dual` values. Node values and local
    partials are stored on the tape.
    """
    _check_inputs(tape, inputs)
    for i in range(len(tape.nodes)):
        tape.evaluate_node(i, inputs[i] if i < tape.num_inputs else None)
    if any(isinstance(x, Dual) for x in inputs):
        tape.counter.tangent_ops += tape.edge_count()
    return [tape.nodes[j].value for j in tape.output_indices]


@dataclass
class Evaluation:
    """Result of a kernel forward pass: values and local partials per node."""

    values: np.ndarray
    d0: np.ndarray
    d1: np.ndarray
    outputs: np.ndarray = field(default=None)


def evaluate_arrays(tape: Tape, inputs, kern=None) -> Evaluation:
    """Kernel-backed forward sweep that leaves the node objects untouched."""
    _check_inputs(tape, inputs)
    kern = kern or kernels.active
    arr = tape.arrays()
    x = np.asarray(inputs, dtype=np.float64)
    m = arr.size
    val = np.empty(m)
    d0 = np.empty(m)
    d1 = np.empty(m)
    node, code = kern.forward_values(arr.op, arr.p0, arr.p1, arr.const, x, val, d0, d1)
    if node >= 0:
        raise DomainError(kernels.ERROR_MESSAGES[code], node=int(node), op=Op(arr.op[node]).name)
    tape.counter.primal_ops += tape.working_count()
    return Evaluation(val, d0, d1, val[arr.outputs])


def export_dot(tape: Tape, labels: dict | None = None) -> str:
    """Render the tape as a Graphviz digraph.

    Inputs are labelled by name (``labels["inputs"]`` overrides the tape's own
    names), working nodes by ``v<k> <op>`` and constants by value. Outputs get
    a double border and, optionally, an ``xlabel`` from ``labels["outputs"]``.
    """
    if not tape.nodes:
        raise TapeError("cannot render an empty tape")
    labels = labels or {}
    in_names = labels.get("inputs")
    out_names = labels.get("outputs")
    outputs = set(tape.output_indices)
    lines = ["digraph trace {", "  rankdir=LR;"]
    for i, node in enumerate(tape.nodes):
        if node.op is Op.INPUT:
            text = in_names[i] if in_names else tape.input_name(i)
        elif node.op is Op.CONST:
            text = format_number(node.const)
        else:
            text = f"{tape.label(i)} {node.op.symbol}"
        attrs = [f'label="{text}"']
        if node.op is Op.INPUT:
            attrs.append("shape=box")
        if i in outputs:
            attrs.append("peripheries=2")
            if out_names:
                j = tape.output_indices.index(i)
                if j < len(out_names):
                    attrs.append(f'xlabel="{out_names[j]}"')
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for i, node in enumerate(tape.nodes):
        for p in node.parents:
            lines.append(f"  n{p} -> n{i};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_number(x: float) -> str:
    """Shortest text for a float that the expression parser reads back exactly."""
    x = float(x)
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)
