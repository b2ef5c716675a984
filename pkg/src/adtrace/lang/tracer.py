"""Execute a parsed program on traced inputs, producing a straight-line tape.

Conditionals are decided on the numeric values at the trace point and only the
taken branch is recorded; ``repeat`` bodies are recorded once per iteration.
The derivative of the resulting tape is therefore the derivative of the path
actually taken: at a branch boundary (``x == 0`` for an abs-like program) it is
the derivative of whichever branch the comparison selected, not a
generalized derivative.

Within one expression, operations are recorded by tree height (all operations
on leaves first, then their consumers, ties left to right), which is the
order a hand-written evaluation trace lists them in.
"""

from __future__ import annotations

import math
from typing import Sequence

from ..errors import DimensionError, DomainError
from ..tape import BINARY_OPS, Tape
from ..tracing import TracedFunction, Var, binary, unary
from .ast import BinOp, Compare, If, Neg, Num, Program, Repeat, children


def _schedule(e):
    """Interior nodes of ``e`` ordered by (height, post-order position)."""
    order = []
    height = {}
    stack = [(e, False)]
    while stack:
        node, ready = stack.pop()
        kids = children(node)
        if not kids:
            height[id(node)] = 0
            continue
        if not ready:
            stack.append((node, True))
            stack.extend((k, False) for k in reversed(kids))
            continue
        height[id(node)] = 1 + max(height[id(k)] for k in kids)
        order.append(node)
    order = sorted(enumerate(order), key=lambda p: (height[id(p[1])], p[0]))
    return [node for _, node in order]


def _leaf(node, env):
    if isinstance(node, Num):
        return node.value
    return env[node.id]


def eval_expr(e, env: dict):
    """Evaluate ``e`` with values from ``env`` (floats or vars)."""
    if not children(e):
        return _leaf(e, env)
    vals = {}

    def get(k):
        return vals[id(k)] if children(k) else _leaf(k, env)

    for node in _schedule(e):
        try:
            if isinstance(node, BinOp):
                vals[id(node)] = binary(BINARY_OPS[node.op], get(node.left), get(node.right))
            elif isinstance(node, Neg):
                vals[id(node)] = unary("neg", get(node.arg))
            else:
                vals[id(node)] = unary(node.func, get(node.arg))
        except DomainError as exc:
            if exc.node is None:
                raise DomainError(f"{exc} (expression at offset {node.span.start})") from None
            raise
    return vals[id(e)]


def _primal_env(env):
    return {k: (v.value if isinstance(v, Var) else v) for k, v in env.items()}


def _eval_primal(e, env):
    """Float-only evaluation used for branch conditions; records nothing."""
    return eval_expr(e, _primal_env(env))


def _decide(test: Compare, env) -> bool:
    a = float(_eval_primal(test.left, env))
    b = float(_eval_primal(test.right, env))
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"comparison on a non-finite value (at offset {test.span.start})")
    if test.op == "<":
        return a < b
    if test.op == "<=":
        return a <= b
    if test.op == ">":
        return a > b
    if test.op == ">=":
        return a >= b
    return a == b  # exact floating-point equality


def run_statements(stmts, env):
    for s in stmts:
        if isinstance(s, If):
            branch = s.body if _decide(s.test, env) else (s.orelse or ())
            run_statements(branch, env)
        elif isinstance(s, Repeat):
            for _ in range(s.count):
                run_statements(s.body, env)
        else:
            env[s.target] = eval_expr(s.value, env)


def program_function(prog: Program) -> TracedFunction:
    def fn(*xs):
        env = dict(zip(prog.params, xs))
        run_statements(prog.body, env)
        return [eval_expr(r, env) for r in prog.returns]

    return TracedFunction(fn, prog.params)


def trace(prog: Program, inputs: Sequence[float]) -> Tape:
    """Trace ``prog`` at ``inputs`` into a fresh tape."""
    return program_function(prog).trace(list(inputs))


def evaluate(prog: Program, inputs: Sequence[float]) -> list[float]:
    """Plain float evaluation, no tape."""
    if len(inputs) != len(prog.params):
        raise DimensionError(f"expected {len(prog.params)} inputs, got {len(inputs)}")
    env = dict(zip(prog.params, (float(x) for x in inputs)))
    run_statements(prog.body, env)
    out = [float(eval_expr(r, env)) for r in prog.returns]
    if not all(math.isfinite(y) for y in out):
        raise DomainError("non-finite result")
    return out
