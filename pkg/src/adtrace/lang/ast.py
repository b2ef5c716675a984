"""Syntax tree for the expression language.

Expression nodes double as the symbolic-expression type used by
:mod:`adtrace.baselines`. Spans are excluded from equality so that trees
built by hand, by the parser or by symbolic differentiation compare
structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError(f"bad span {self.start}..{self.end}")


NOSPAN = SourceSpan(0, 0)


@dataclass(frozen=True)
class Num:
    value: float
    span: SourceSpan = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Name:
    id: str
    span: SourceSpan = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    arg: "Expr"
    span: SourceSpan = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"
    span: SourceSpan = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    func: str  # ln exp sin cos tan sqrt
    arg: "Expr"
    span: SourceSpan = field(default=NOSPAN, compare=False, repr=False)


Expr = Union[Num, Name, Neg, BinOp, Call]


@dataclass(frozen=True)
class Compare:
    op: str  # < <= > >= ==
    left: Expr
    right: Expr
    span: SourceSpan = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Assign:
    target: str
    value: Expr
    span: SourceSpan = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    test: Compare
    body: tuple
    orelse: Optional[tuple] = None
    span: SourceSpan = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Repeat:
    count: int
    body: tuple
    span: SourceSpan = field(default=NOSPAN, compare=False, repr=False)


Stmt = Union[Assign, If, Repeat]


@dataclass(frozen=True)
class Program:
    params: tuple
    body: tuple
    returns: tuple
    bare: bool = field(default=False, compare=False)


def children(e: Expr) -> tuple:
    if isinstance(e, Neg) or isinstance(e, Call):
        return (e.arg,)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    return ()


def size(e: Expr) -> int:
    """Node count of an expression tree."""
    total = 0
    stack = [e]
    while stack:
        node = stack.pop()
        total += 1
        stack.extend(children(node))
    return total


def operator_count(e: Expr) -> int:
    total = 0
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, (Neg, BinOp, Call)):
            total += 1
        stack.extend(children(node))
    return total


def free_names(e: Expr) -> list[str]:
    """Variable names in first-use (left-to-right) order."""
    seen: dict[str, None] = {}

    def walk(node):
        if isinstance(node, Name):
            seen.setdefault(node.id, None)
        for c in children(node):
            walk(c)

    walk(e)
    return list(seen)
