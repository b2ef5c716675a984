import math
import random

import numpy as np
import pytest

from adtrace import gradient
from adtrace.baselines import (
    FdConfig, UnboundVariable, fd_error_curve, fd_gradient, fd_jacobian, product_chain, swell_rows,
    sym_diff, sym_eval,
)
from adtrace.lang.ast import BinOp, Call, Name, Num, size
from adtrace.lang.parser import parse, parse_expr
from adtrace.lang.printer import to_source
from adtrace.lang.tracer import program_function
from conftest import RUNNING, RUNNING_POINT
from exprgen import generic_point, random_expr


def test_fd_sin_at_zero():
    assert fd_gradient(lambda p: math.sin(p[0]), [0.0]) == pytest.approx([1.0], abs=1e-10)


def test_fd_running_example():
    f = program_function(parse(RUNNING))
    assert fd_gradient(f, RUNNING_POINT) == pytest.approx([5.5, 2 - math.cos(5)], abs=1e-6)


def test_fd_forward_scheme_is_coarser():
    f = lambda p: math.exp(p[0])  # noqa: E731
    central = abs(fd_gradient(f, [1.0])[0] - math.e)
    forward = abs(fd_gradient(f, [1.0], FdConfig(scheme="forward"))[0] - math.e)
    assert central < forward < 1e-6


def test_fd_config_validation():
    with pytest.raises(ValueError):
        FdConfig(scheme="backward")
    with pytest.raises(ValueError):
        FdConfig(step=0.0)


def test_fd_jacobian_shape():
    jac = fd_jacobian(lambda p: [p[0] * p[1], p[0]], [2.0, 3.0])
    assert jac.shape == (2, 2)
    assert jac == pytest.approx(np.array([[3.0, 2.0], [1.0, 0.0]]))


def test_v_curve_for_sin():
    err = fd_error_curve(lambda x: math.sin(x), math.cos(1.0), 1.0, [1e-1, 1e-8, 1e-15])
    assert err[1] * 10 < err[0] and err[1] * 10 < err[2]


def test_v_curve_on_random_functions():
    fns = [
        (math.exp, math.exp), (math.sin, math.cos), (math.cos, lambda x: -math.sin(x)),
        (lambda x: x ** 3, lambda x: 3 * x * x), (math.log, lambda x: 1 / x),
        (lambda x: math.sqrt(x), lambda x: 0.5 / math.sqrt(x)), (math.tan, lambda x: 1 + math.tan(x) ** 2),
        (lambda x: 1 / (1 + x * x), lambda x: -2 * x / (1 + x * x) ** 2),
        (lambda x: math.exp(-x) * x, lambda x: math.exp(-x) * (1 - x)),
        (lambda x: x ** 4 - x, lambda x: 4 * x ** 3 - 1),
    ]
    rng = random.Random(0)
    v_shaped = 0
    for f, df in fns:
        x = rng.uniform(0.4, 1.2)
        e = fd_error_curve(f, df(x), x, [1e-1, 1e-6, 1e-15])
        v_shaped += e[1] < e[0] and e[1] < e[2]
    assert v_shaped >= 9


def test_sym_diff_examples():
    assert to_source(sym_diff(parse_expr("x*x"), "x")) == "x + x"
    assert to_source(sym_diff(parse_expr("ln(x)"), "x")) == "1 / x"
    d = sym_diff(parse_expr(RUNNING), "x1")
    assert sym_eval(d, {"x1": 2.0, "x2": 5.0}) == pytest.approx(5.5, abs=1e-12)


def test_sym_eval_constant_and_unbound():
    assert sym_eval(Num(3.25), {}) == 3.25
    with pytest.raises(UnboundVariable):
        sym_eval(parse_expr("x + y"), {"x": 1.0})


def test_sym_diff_is_structural():
    # no bindings exist anywhere; differentiation must not need any
    e = parse_expr("sin(a*b) / (c + exp(a))")
    d = sym_diff(e, "a")
    assert isinstance(d, BinOp)
    with pytest.raises(UnboundVariable):
        sym_eval(d, {})


def test_minimal_simplifier_only():
    d = sym_diff(parse_expr("x - x"), "x")
    assert to_source(d) == "1 - 1" or to_source(d) == "0"
    assert to_source(sym_diff(parse_expr("x - x"), "x", simplify=True)) == "0"


def test_three_way_agreement():
    rng = random.Random(9)
    for _ in range(60):
        names = ["x1", "x2", "x3"]
        e = random_expr(rng, names, 6)
        f = program_function(parse(to_source(e)))
        if not f.params:
            continue
        x = generic_point(f, rng)
        tape = f.trace(x)
        ad = np.array(gradient(tape, x))
        sym = np.array([sym_eval(sym_diff(e, p), dict(zip(f.params, x))) for p in f.params])
        fd = np.array(fd_gradient(f, x))
        scale = max(1.0, np.max(np.abs(ad)))
        assert np.max(np.abs(ad - sym)) <= 1e-10 * scale
        assert np.max(np.abs(ad - fd)) <= 1e-5 * scale
        assert np.max(np.abs(sym - fd)) <= 1e-5 * scale


def test_product_chain_shape():
    e = product_chain(3)
    assert to_source(e) == "sin(1 * x) * sin(2 * x) * sin(3 * x)"
    assert size(e) == 14


def test_swell_rows():
    rows = swell_rows(10)
    ks = [r[0] for r in rows]
    sym = [r[2] for r in rows]
    tape = [r[3] for r in rows]
    assert ks == list(range(2, 11))
    ratios = [s / k for k, s in zip(ks, sym)]
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert all(t == 4 * k for k, t in zip(ks, tape))


def test_simplify_shrinks_but_still_swells():
    plain = swell_rows(8)
    simp = swell_rows(8, simplify=True)
    assert all(s[2] <= p[2] for s, p in zip(simp, plain))
    assert isinstance(Call("sin", Name("x")), Call)
