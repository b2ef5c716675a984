"""Pretty-printer producing source the parser reads back to the same tree."""

from __future__ import annotations

from ..tape import format_number
from .ast import Assign, BinOp, Call, If, Name, Neg, Num, Program, Repeat

# binding strength; higher binds tighter
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(e):
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    if isinstance(e, Num) and e.value < 0:
        return _PREC["neg"]
    return _PREC["atom"]


def to_source(e) -> str:
    """Render an expression with the fewest parentheses that keep its shape.

    Iterative, so left-deep chains of any length print without recursion.
    """
    out: dict[int, str] = {}
    stack = [(e, False)]
    while stack:
        node, ready = stack.pop()
        if isinstance(node, Num):
            text = format_number(node.value)
            out[id(node)] = f"-{format_number(-node.value)}" if node.value < 0 else text
            continue
        if isinstance(node, Name):
            out[id(node)] = node.id
            continue
        kids = (node.arg,) if isinstance(node, (Neg, Call)) else (node.left, node.right)
        if not ready:
            stack.append((node, True))
            stack.extend((k, False) for k in kids)
            continue
        if isinstance(node, Call):
            out[id(node)] = f"{node.func}({out[id(node.arg)]})"
        elif isinstance(node, Neg):
            arg = out[id(node.arg)]
            # -(-x) and -(a^b)? the latter binds tighter so needs no parens
            if _prec(node.arg) < _PREC["neg"] or isinstance(node.arg, Neg) or (
                isinstance(node.arg, Num) and node.arg.value < 0
            ):
                arg = f"({arg})"
            out[id(node)] = f"-{arg}"
        else:
            p = _PREC[node.op]
            left, right = out[id(node.left)], out[id(node.right)]
            if node.op == "^":
                # base must be an atom; exponent is a unary
                if _prec(node.left) <= p:
                    left = f"({left})"
                if _prec(node.right) < _PREC["neg"]:
                    right = f"({right})"
            else:
                if _prec(node.left) < p:
                    left = f"({left})"
                if _prec(node.right) <= p:
                    right = f"({right})"
            out[id(node)] = f"{left} {node.op} {right}"
    return out[id(e)]


def program_to_source(prog: Program) -> str:
    if prog.bare:
        return ", ".join(to_source(r) for r in prog.returns)
    lines = ["params " + ", ".join(prog.params)]

    def emit(stmts, indent):
        pad = "  " * indent
        for s in stmts:
            if isinstance(s, Assign):
                lines.append(f"{pad}{s.target} = {to_source(s.value)}")
            elif isinstance(s, If):
                t = s.test
                lines.append(f"{pad}if {to_source(t.left)} {t.op} {to_source(t.right)}:")
                emit(s.body, indent + 1)
                if s.orelse is not None:
                    lines.append(f"{pad}else:")
                    emit(s.orelse, indent + 1)
                lines.append(f"{pad}end")
            elif isinstance(s, Repeat):
                lines.append(f"{pad}repeat {s.count}:")
                emit(s.body, indent + 1)
                lines.append(f"{pad}end")

    emit(prog.body, 1)
    lines.append("return " + ", ".join(to_source(r) for r in prog.returns))
    return "\n".join(lines) + "\n"
