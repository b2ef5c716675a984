"""Lexer and recursive-descent parser for the expression language.

Grammar::

    program    := "params" ident ("," ident)* stmt* "return" expr ("," expr)*
    stmt       := ident "=" expr
                | "if" cmp ":" stmt* ("else" ":" stmt*)? "end"
                | "repeat" integer ":" stmt* "end"
    cmp        := expr ("<" | "<=" | ">" | ">=" | "==") expr
    expr       := term (("+" | "-") term)*
    term       := unary (("*" | "/") unary)*
    unary      := "-" unary | power
    power      := atom ("^" unary)?
    atom       := number | ident | func "(" expr ")" | "(" expr ")"
    func       := "ln" | "exp" | "sin" | "cos" | "tan" | "sqrt"

A source that does not start with ``params`` is read as a bare,
comma-separated list of expressions whose parameters are the free variables
in first-use order. Whitespace (newlines included) and ``;`` separate
nothing and may appear anywhere; ``#`` starts a comment.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..errors import ParseError
from .ast import (
    Assign, BinOp, Call, Compare, If, Name, Neg, Num, Program, Repeat, SourceSpan, free_names,
)

FUNCS = ("ln", "exp", "sin", "cos", "tan", "sqrt")
KEYWORDS = ("params", "return", "if", "else", "end", "repeat")
COMPARATORS = ("<", "<=", ">", ">=", "==")
MAX_DEPTH = 100

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n;]+|\#[^\n]*)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op><=|>=|==|[-+*/^(),:=<>])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, kw, op, eof
    text: str
    span: SourceSpan


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN.match(source, pos)
        if m is None:
            ch = source[pos]
            raise ParseError(f"lexical error: unexpected character {ch!r}", SourceSpan(pos, pos + 1))
        kind = m.lastgroup
        text = m.group()
        span = SourceSpan(pos, m.end())
        pos = m.end()
        if kind == "ws":
            continue
        if kind == "ident" and text in KEYWORDS:
            kind = "kw"
        tokens.append(Token(kind, text, span))
    tokens.append(Token("eof", "", SourceSpan(n, n)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0
        self.depth = 0

    # token helpers -----------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, kind, text=None):
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind, text=None, what=None):
        if not self.at(kind, text):
            self.fail(f"expected {what or (repr(text) if text else kind)}")
        return self.advance()

    def fail(self, message, token=None):
        token = token or self.tok
        found = "end of input" if token.kind == "eof" else repr(token.text)
        raise ParseError(f"syntax error: {message}, found {found}", token.span)

    def span_from(self, start: int) -> SourceSpan:
        prev = self.tokens[self.pos - 1] if self.pos > 0 else self.tok
        return SourceSpan(start, max(start, prev.span.end))

    # expressions -------------------------------------------------------
    def expr(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ParseError("syntax error: expression nested too deeply", self.tok.span)
        start = self.tok.span.start
        node = self.term()
        while self.at("op", "+") or self.at("op", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term(), self.span_from(start))
        self.depth -= 1
        return node

    def term(self):
        start = self.tok.span.start
        node = self.unary()
        while self.at("op", "*") or self.at("op", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary(), self.span_from(start))
        return node

    def unary(self):
        start = self.tok.span.start
        if self.at("op", "-"):
            self.advance()
            self.depth += 1
            if self.depth > MAX_DEPTH:
                raise ParseError("syntax error: expression nested too deeply", self.tok.span)
            arg = self.unary()
            self.depth -= 1
            return Neg(arg, self.span_from(start))
        return self.power()

    def power(self):
        start = self.tok.span.start
        base = self.atom()
        if self.at("op", "^"):
            self.advance()
            self.depth += 1
            if self.depth > MAX_DEPTH:
                raise ParseError("syntax error: expression nested too deeply", self.tok.span)
            exponent = self.unary()
            self.depth -= 1
            return BinOp("^", base, exponent, self.span_from(start))
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            value = float(t.text)
            if not math.isfinite(value):
                raise ParseError(f"lexical error: numeric literal {t.text} out of range", t.span)
            return Num(value, t.span)
        if t.kind == "ident":
            self.advance()
            if t.text in FUNCS:
                self.expect("op", "(", f"'(' after {t.text}")
                arg = self.expr()
                self.expect("op", ")", "')'")
                return Call(t.text, arg, self.span_from(t.span.start))
            return Name(t.text, t.span)
        if self.at("op", "("):
            self.advance()
            inner = self.expr()
            self.expect("op", ")", "')'")
            return inner
        self.fail("expected a number, variable, function call or '('")

    def compare(self):
        start = self.tok.span.start
        left = self.expr()
        if not (self.tok.kind == "op" and self.tok.text in COMPARATORS):
            self.fail("expected a comparison operator")
        op = self.advance().text
        right = self.expr()
        return Compare(op, left, right, self.span_from(start))

    # statements --------------------------------------------------------
    def check_defined(self, node, defined):
        stack = [node]
        while stack:
            e = stack.pop()
            if isinstance(e, Name):
                if e.id not in defined:
                    raise ParseError(f"use before assignment: {e.id!r}", e.span)
            elif isinstance(e, (Neg, Call)):
                stack.append(e.arg)
            elif isinstance(e, (BinOp, Compare)):
                stack.append(e.right)
                stack.append(e.left)

    def block(self, defined, params, terminators):
        stmts = []
        while not (self.tok.kind == "kw" and self.tok.text in terminators):
            if self.tok.kind == "eof" or (self.tok.kind == "kw" and self.tok.text in ("return", "else", "end")):
                self.fail(f"expected {' or '.join(repr(t) for t in terminators)}")
            stmts.append(self.stmt(defined, params))
        return tuple(stmts)

    def stmt(self, defined, params):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ParseError("syntax error: statements nested too deeply", self.tok.span)
        node = self._stmt(defined, params)
        self.depth -= 1
        return node

    def _stmt(self, defined, params):
        t = self.tok
        if t.kind == "kw" and t.text == "if":
            self.advance()
            test = self.compare()
            self.check_defined(test, defined)
            self.expect("op", ":", "':' after condition")
            then_defined = set(defined)
            body = self.block(then_defined, params, ("else", "end"))
            orelse = None
            if self.at("kw", "else"):
                self.advance()
                self.expect("op", ":", "':' after else")
                else_defined = set(defined)
                orelse = self.block(else_defined, params, ("end",))
                defined |= then_defined & else_defined
            self.expect("kw", "end", "'end'")
            return If(test, body, orelse, self.span_from(t.span.start))
        if t.kind == "kw" and t.text == "repeat":
            self.advance()
            c = self.tok
            if c.kind != "num" or not c.text.isdigit():
                raise ParseError("non-constant loop bound: repeat needs a non-negative integer literal", c.span)
            self.advance()
            count = int(c.text)
            self.expect("op", ":", "':' after repeat count")
            body_defined = set(defined)
            body = self.block(body_defined, params, ("end",))
            self.expect("kw", "end", "'end'")
            if count > 0:
                defined |= body_defined
            return Repeat(count, body, self.span_from(t.span.start))
        if t.kind == "ident":
            if t.text in FUNCS:
                self.fail(f"cannot assign to built-in function {t.text!r}", t)
            self.advance()
            if t.text in params:
                raise ParseError(f"cannot assign to parameter {t.text!r}", t.span)
            self.expect("op", "=", "'='")
            value = self.expr()
            self.check_defined(value, defined)
            defined.add(t.text)
            return Assign(t.text, value, self.span_from(t.span.start))
        self.fail("expected a statement or 'return'")

    def program(self) -> Program:
        if self.at("kw", "params"):
            self.advance()
            params = [self.param()]
            while self.at("op", ","):
                self.advance()
                params.append(self.param())
            seen = set()
            for i, p in enumerate(params):
                if p.text in seen:
                    raise ParseError(f"duplicate parameter {p.text!r}", p.span)
                seen.add(p.text)
            names = tuple(p.text for p in params)
            defined = set(names)
            body = self.block(defined, set(names), ("return",))
            self.expect("kw", "return", "'return'")
            returns = self.expr_list()
            for r in returns:
                self.check_defined(r, defined)
            self.expect("eof", what="end of input")
            return Program(names, body, returns)
        returns = self.expr_list()
        self.expect("eof", what="end of input")
        params: dict[str, None] = {}
        for r in returns:
            for name in free_names(r):
                params.setdefault(name, None)
        return Program(tuple(params), (), returns, bare=True)

    def param(self):
        t = self.tok
        if t.kind != "ident" or t.text in FUNCS:
            self.fail("expected a parameter name")
        return self.advance()

    def expr_list(self):
        out = [self.expr()]
        while self.at("op", ","):
            self.advance()
            out.append(self.expr())
        return tuple(out)


def parse(source: str) -> Program:
    """Parse a program or bare expression list; raises :class:`ParseError`."""
    return _Parser(source).program()


def parse_expr(source: str):
    """Parse a single bare expression."""
    p = _Parser(source)
    node = p.expr()
    p.expect("eof", what="end of input")
    return node
