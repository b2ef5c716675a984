"""Cross-engine properties over randomly generated programs."""

import random

import numpy as np
from hypothesis import HealthCheck, given, settings, strategies as st

from adtrace import Dual, HvpRequest, forward_sweep, hvp, reverse_sweep
from adtrace.elementary import FUNCTIONS
from adtrace.forward import forward_directional, jacobian_forward
from adtrace.lang.ast import BinOp, Call, Name, Neg, Num
from adtrace.lang.parser import parse
from adtrace.lang.tracer import program_function
from adtrace.reverse import jacobian_reverse
from exprgen import generic_point, random_program_source

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def eval_ast(e, env):
    """Direct evaluation with Python operators, used to drive Dual arithmetic."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Name):
        return env[e.id]
    if isinstance(e, Neg):
        return -eval_ast(e.arg, env)
    if isinstance(e, Call):
        return FUNCTIONS[e.func](eval_ast(e.arg, env))
    a, b = eval_ast(e.left, env), eval_ast(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        return a / b
    return a ** b


def _case(seed, max_outputs=2):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    src, outs = random_program_source(rng, n, rng.randint(1, max_outputs), max_depth=7)
    f = program_function(parse(src))
    try:
        x = generic_point(f, rng)
    except RuntimeError:
        return None
    return rng, f, outs, x


def _close(a, b, tol):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(b)))


@SETTINGS
@given(seed=st.integers(0, 2 ** 32))
def test_dual_overloading_matches_tape_sweep(seed):
    case = _case(seed)
    if case is None:
        return
    rng, f, outs, x = case
    seed_vec = [rng.uniform(-1, 1) for _ in x]
    _, tape_t = forward_directional(f.trace(x), x, seed_vec)
    env = {p: Dual(xi, si) for p, xi, si in zip(f.params, x, seed_vec)}
    dual_t = []
    for e in outs:
        y = eval_ast(e, env)
        dual_t.append(y.tangent if isinstance(y, Dual) else 0.0)
    assert _close(tape_t, dual_t, 1e-12)


@SETTINGS
@given(seed=st.integers(0, 2 ** 32))
def test_forward_and_reverse_jacobians_agree(seed):
    case = _case(seed, 3)
    if case is None:
        return
    _, f, _, x = case
    tape = f.trace(x)
    assert _close(jacobian_forward(tape, x), jacobian_reverse(tape, x), 1e-10)


@SETTINGS
@given(seed=st.integers(0, 2 ** 32))
def test_generic_and_kernel_reverse_agree(seed):
    case = _case(seed, 1)
    if case is None:
        return
    _, f, _, x = case
    tape = f.trace(x)
    forward_sweep(tape, x)
    generic = reverse_sweep(tape).inputs
    assert _close(generic, jacobian_reverse(tape, x)[0], 1e-13)


@SETTINGS
@given(seed=st.integers(0, 2 ** 32), scale=st.floats(-3, 3))
def test_hvp_is_linear_in_direction(seed, scale):
    case = _case(seed, 1)
    if case is None:
        return
    rng, f, _, x = case
    u = [rng.uniform(-1, 1) for _ in x]
    w = [rng.uniform(-1, 1) for _ in x]
    hu = np.array(hvp(f, HvpRequest(x, u)))
    hw = np.array(hvp(f, HvpRequest(x, w)))
    mix = [a + scale * b for a, b in zip(u, w)]
    hm = np.array(hvp(f, HvpRequest(x, mix)))
    assert _close(hm, hu + scale * hw, 1e-10)


@SETTINGS
@given(seed=st.integers(0, 2 ** 32))
def test_retracing_is_deterministic(seed):
    case = _case(seed)
    if case is None:
        return
    _, f, _, x = case
    a, b = f.trace(x), f.trace(x)
    assert [(n.op, n.parents, n.value) for n in a.nodes] == [(n.op, n.parents, n.value) for n in b.nodes]
