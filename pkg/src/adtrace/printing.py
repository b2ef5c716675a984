"""Plain-text listings of forward, tangent and adjoint traces.

Labels follow the usual convention: with n inputs, node i prints as
``v{i-n+1}`` so two inputs read ``v-1, v0``. The adjoint listing is in sweep
order (last node first) and writes the first contribution to an adjoint as a
plain assignment and later ones as increments, the way a hand-derived adjoint
trace does.
"""

from __future__ import annotations

from typing import Sequence

from .tape import Op, Tape, forward_sweep, format_number


def _fmt(x, precision):
    return f"{float(x) + 0.0:.{precision}f}"


def _ref(tape: Tape, i: int) -> str:
    node = tape.nodes[i]
    if node.op is Op.CONST:
        return format_number(node.const)
    return tape.label(i)


def _primal_text(tape, i):
    node = tape.nodes[i]
    if node.op is Op.INPUT:
        return tape.input_name(i)
    if node.op is Op.CONST:
        return format_number(node.const)
    args = [_ref(tape, p) for p in node.parents]
    if node.op is Op.NEG:
        return f"-{args[0]}"
    if node.op.arity == 2:
        return f"{args[0]} {node.op.symbol} {args[1]}"
    return f"{node.op.symbol}({args[0]})"


def _partial_text(tape, i, slot):
    node = tape.nodes[i]
    a = _ref(tape, node.parents[0])
    b = _ref(tape, node.parents[1]) if len(node.parents) > 1 else ""
    me = tape.label(i)
    op = node.op
    if op is Op.ADD:
        return "1"
    if op is Op.SUB:
        return "1" if slot == 0 else "-1"
    if op is Op.MUL:
        return b if slot == 0 else a
    if op is Op.DIV:
        return f"1 / {b}" if slot == 0 else f"-{me} / {b}"
    if op is Op.NEG:
        return "-1"
    if op is Op.POW:
        return f"{b} * {a}^({b} - 1)" if slot == 0 else f"{me} * ln({a})"
    if op is Op.LN:
        return f"1 / {a}"
    if op is Op.EXP:
        return me
    if op is Op.SIN:
        return f"cos({a})"
    if op is Op.COS:
        return f"-sin({a})"
    if op is Op.TAN:
        return f"1 + {me}^2"
    return f"1 / (2 * {me})"


def _wrap(text):
    return f"({text})" if " " in text else text


def _dot(tape, i):
    return "d" + tape.label(i)


def _tangent_text(tape, i):
    node = tape.nodes[i]
    if node.op is Op.INPUT:
        return "d" + tape.input_name(i)
    if node.op is Op.CONST:
        return "0"
    text = ""
    for slot, p in enumerate(node.parents):
        if tape.nodes[p].op is Op.CONST:
            continue
        partial = _partial_text(tape, i, slot)
        if partial in ("1", "-1"):
            sign, term = partial[:-1], _dot(tape, p)
        else:
            sign, term = "", f"{_wrap(partial)} * {_dot(tape, p)}"
        if not text:
            text = sign + term
        else:
            text += f" {sign or '+'} {term}"
    return text or "0"


def _table(rows, precision):
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows)
    vals = [_fmt(r[2], precision) for r in rows]
    w2 = max(len(v) for v in vals)
    return [f"{r[0]:<{w0}} = {r[1]:<{w1}} = {v:>{w2}}" for r, v in zip(rows, vals)]


def format_forward_trace(tape: Tape, inputs: Sequence[float], seed: Sequence[float] | None = None,
                         precision: int = 4) -> str:
    """Evaluation trace, followed by the tangent trace when ``seed`` is given.

    Tangent names are prefixed with ``d``: ``dv1`` is the derivative of ``v1``
    along the seed direction.
    """
    outputs = forward_sweep(tape, list(inputs))
    n = tape.num_inputs
    primal_rows = [(tape.label(i), _primal_text(tape, i), node.value) for i, node in enumerate(tape.nodes)]
    for j, idx in enumerate(tape.output_indices):
        name = "y" if tape.num_outputs == 1 else f"y{j + 1}"
        primal_rows.append((name, tape.label(idx), outputs[j]))
    lines = ["Forward evaluation trace"]
    lines += ["  " + s for s in _table(primal_rows, precision)]
    if seed is None:
        return "\n".join(lines) + "\n"
    tan = [0.0] * len(tape.nodes)
    for i, node in enumerate(tape.nodes):
        if i < n:
            tan[i] = float(seed[i])
        else:
            tan[i] = sum(d * tan[p] for p, d in zip(node.parents, node.partials))
    tangent_rows = [(_dot(tape, i), _tangent_text(tape, i), tan[i]) for i in range(len(tape.nodes))]
    for j, idx in enumerate(tape.output_indices):
        name = "dy" if tape.num_outputs == 1 else f"dy{j + 1}"
        tangent_rows.append((name, _dot(tape, idx), tan[idx]))
    lines.append("")
    lines.append("Forward derivative trace")
    lines += ["  " + s for s in _table(tangent_rows, precision)]
    return "\n".join(lines) + "\n"


def adjoint_steps(tape: Tape, output: int = 0):
    """(target, source, slot, incremental, new adjoint value) per edge, in sweep order."""
    nodes = tape.nodes
    adj = [0.0] * len(nodes)
    touched = [False] * len(nodes)
    out = tape.output_indices[output]
    adj[out] = 1.0
    touched[out] = True
    steps = []
    for i in range(len(nodes) - 1, -1, -1):
        for slot, (p, d) in enumerate(zip(nodes[i].parents, nodes[i].partials)):
            incremental = touched[p]
            adj[p] = adj[p] + adj[i] * d
            touched[p] = True
            steps.append((p, i, slot, incremental, adj[p]))
    return steps, adj


def format_adjoint_trace(tape: Tape, inputs: Sequence[float], output: int = 0, precision: int = 4) -> str:
    """Reverse adjoint trace for one output, seeded with 1."""
    forward_sweep(tape, list(inputs))
    steps, adj = adjoint_steps(tape, output)
    bar = lambda i: "b" + tape.label(i)  # noqa: E731
    out = tape.output_indices[output]
    rows = [(bar(out), "by", 1.0)]
    for p, i, slot, incremental, value in steps:
        if tape.nodes[p].op is Op.CONST:
            continue
        partial = _partial_text(tape, i, slot)
        contrib = f"{bar(i)} * {_wrap(partial)}"
        rhs = f"{bar(p)} + {contrib}" if incremental else contrib
        rows.append((bar(p), rhs, value))
    for k in range(tape.num_inputs):
        rows.append(("b" + tape.input_name(k), bar(k), adj[k]))
    lines = ["Reverse adjoint trace (sweep order; b<v> is the adjoint of v)"]
    lines += ["  " + s for s in _table(rows, precision)]
    return "\n".join(lines) + "\n"
