"""Random well-conditioned expressions for cross-checking the engines.

Every operator of the language can appear. Domain-restricted operations are
wrapped so the argument stays in a safe range at any real point:

    ln(e)    -> ln(1 + e*e)
    sqrt(e)  -> sqrt(1 + e*e)
    a / b    -> a / (1 + b*b)
    tan(e)   -> tan(0.5 * sin(e))
    exp(e)   -> exp(sin(e))
    a ^ b    -> (1 + a*a) ^ sin(b)   or   a ^ k for a small integer k

The wrappers consume depth, so the stated depth bound holds for the final
tree, not just the random skeleton.
"""

import random

from adtrace.lang.ast import BinOp, Call, Name, Neg, Num, children

ONE = Num(1.0)


def _sq1(e):
    return BinOp("+", ONE, BinOp("*", e, e))


def depth(e) -> int:
    kids = children(e)
    return 1 + (max(depth(k) for k in kids) if kids else 0)


def random_expr(rng: random.Random, names, max_depth: int):
    """A tree of depth at most ``max_depth`` over ``names``."""
    if max_depth <= 1 or rng.random() < 0.15:
        if rng.random() < 0.75:
            return Name(rng.choice(names))
        # literals are non-negative; a negative one prints as a negation
        c = Num(round(rng.uniform(0.0, 2.0), 2))
        return Neg(c) if max_depth >= 2 and rng.random() < 0.3 else c
    kind = rng.choice(["+", "-", "*", "/", "^", "neg", "ln", "exp", "sin", "cos", "tan", "sqrt"])
    d = max_depth
    if kind in ("+", "-", "*"):
        return BinOp(kind, random_expr(rng, names, d - 1), random_expr(rng, names, d - 1))
    if kind == "neg":
        return Neg(random_expr(rng, names, d - 1))
    if kind in ("sin", "cos"):
        return Call(kind, random_expr(rng, names, d - 1))
    if d < 4:
        # not enough depth left for a guarded form
        return BinOp("*", random_expr(rng, names, d - 1), random_expr(rng, names, d - 1))
    if kind == "/":
        return BinOp("/", random_expr(rng, names, d - 1), _sq1(random_expr(rng, names, d - 3)))
    if kind in ("ln", "sqrt"):
        return Call(kind, _sq1(random_expr(rng, names, d - 3)))
    if kind == "exp":
        return Call("exp", Call("sin", random_expr(rng, names, d - 2)))
    if kind == "tan":
        return Call("tan", BinOp("*", Num(0.5), Call("sin", random_expr(rng, names, d - 3))))
    if rng.random() < 0.5:
        k = rng.choice([2, 3, -1, -2])
        exponent = Num(float(k)) if k > 0 else Neg(Num(float(-k)))
        return BinOp("^", random_expr(rng, names, d - 1), exponent)
    return BinOp("^", _sq1(random_expr(rng, names, d - 3)), Call("sin", random_expr(rng, names, d - 2)))


def random_program_source(rng: random.Random, n_inputs: int, n_outputs: int, max_depth: int = 8):
    """``params ... return ...`` source with ``n_outputs`` random expressions."""
    from adtrace.lang.printer import to_source

    names = [f"x{i + 1}" for i in range(n_inputs)]
    outs = [random_expr(rng, names, max_depth) for _ in range(n_outputs)]
    body = ", ".join(to_source(e) for e in outs)
    return f"params {', '.join(names)}\nreturn {body}\n", outs


ALL_OPS = {"+", "-", "*", "/", "^", "neg", "ln", "exp", "sin", "cos", "tan", "sqrt"}


def ops_used(e) -> set:
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, BinOp):
            out.add(node.op)
        elif isinstance(node, Neg):
            out.add("neg")
        elif isinstance(node, Call):
            out.add(node.func)
        stack.extend(children(node))
    return out


def generic_point(f, rng: random.Random, lo=-1.5, hi=1.5, bound=100.0, tries=500):
    """A point where ``f`` is defined and all tape values and first derivatives stay below ``bound``.

    Integer powers with negative exponents can put a pole anywhere; points
    next to one are not generic and are skipped.
    """
    from adtrace.errors import DomainError
    from adtrace.reverse import jacobian_reverse

    for _ in range(tries):
        x = [rng.uniform(lo, hi) for _ in range(len(f.params))]
        try:
            tape = f.trace(x)
            jac = jacobian_reverse(tape, x)
        except DomainError:
            continue
        # every intermediate, not just the outputs: a huge inner value feeding
        # sin or cos makes the function oscillate faster than any FD step resolves
        values = [node.value for node in tape.nodes]
        if max(abs(v) for v in values) < bound and (jac.size == 0 or abs(jac).max() < bound):
            return x
    raise RuntimeError("no generic point found")
