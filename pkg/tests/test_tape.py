import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adtrace import ArityError, DomainError, Op, Tape, TapeError, export_dot, forward_sweep, tape_record
from adtrace.tape import apply_op, local_partials


def running_tape_by_hand():
    t = Tape(["x1", "x2"])
    for op, parents in [
        (Op.INPUT, ()), (Op.INPUT, ()), (Op.LN, (0,)), (Op.MUL, (0, 1)),
        (Op.SIN, (1,)), (Op.ADD, (2, 3)), (Op.SUB, (5, 4)),
    ]:
        tape_record(t, op, parents)
    t.mark_output(6)
    return t


def test_record_running_example_indices():
    t = Tape()
    idx = [tape_record(t, Op.INPUT), tape_record(t, Op.INPUT)]
    idx += [tape_record(t, Op.LN, [0]), tape_record(t, Op.MUL, [0, 1]), tape_record(t, Op.SIN, [1])]
    idx += [tape_record(t, Op.ADD, [2, 3]), tape_record(t, Op.SUB, [5, 4])]
    assert idx == list(range(7))
    assert t.num_inputs == 2


def test_const_has_no_parents():
    t = Tape()
    i = tape_record(t, Op.CONST, const=3.0)
    assert t.nodes[i].parents == () and Op.CONST.arity == 0


def test_arity_mismatch():
    t = Tape()
    tape_record(t, Op.INPUT)
    with pytest.raises(ArityError):
        tape_record(t, Op.MUL, [0])


def test_bad_records():
    t = Tape()
    tape_record(t, Op.INPUT)
    with pytest.raises(TapeError):
        tape_record(t, Op.SIN, [3])
    with pytest.raises(TapeError):
        tape_record(t, Op.CONST)
    tape_record(t, Op.SIN, [0])
    with pytest.raises(TapeError):
        tape_record(t, Op.INPUT)


def test_forward_sweep_running_example():
    t = running_tape_by_hand()
    (y,) = forward_sweep(t, [2.0, 5.0])
    assert y == pytest.approx(11.6521, abs=1e-4)
    assert [round(n.value, 4) for n in t.nodes] == [2.0, 5.0, 0.6931, 10.0, -0.9589, 10.6931, 11.6521]


def test_identity_function():
    t = Tape()
    tape_record(t, Op.INPUT)
    t.mark_output(0)
    assert forward_sweep(t, [7.0]) == [7.0]


def test_ln_domain_error_names_node():
    t = Tape()
    tape_record(t, Op.INPUT)
    tape_record(t, Op.LN, [0])
    t.mark_output(1)
    with pytest.raises(DomainError) as info:
        forward_sweep(t, [-1.0])
    assert info.value.node == 1 and info.value.op == "LN"
    assert "node 1" in str(info.value)


def test_local_partials_examples():
    assert local_partials(Op.MUL, [2.0, 5.0], 10.0) == (5.0, 2.0)
    (d,) = local_partials(Op.SIN, [5.0], math.sin(5.0))
    assert d == pytest.approx(0.2837, abs=1e-4)
    assert local_partials(Op.ADD, [1.5, -2.0], -0.5) == (1.0, 1.0)
    assert local_partials(Op.SUB, [1.5, -2.0], 3.5) == (1.0, -1.0)
    (d,) = local_partials(Op.LN, [2.0], math.log(2.0))
    assert d == 0.5


def test_primal_ops_count_working_nodes():
    t = Tape()
    tape_record(t, Op.INPUT)
    tape_record(t, Op.CONST, const=2.0)
    tape_record(t, Op.MUL, [0, 1])
    tape_record(t, Op.EXP, [2])
    t.mark_output(3)
    forward_sweep(t, [0.3])
    assert t.counter.primal_ops == 2 == t.working_count()


def test_sweep_is_deterministic():
    t = running_tape_by_hand()
    a = [n.value for n in (forward_sweep(t, [2.0, 5.0]) and t.nodes)]
    b = [n.value for n in (forward_sweep(t, [2.0, 5.0]) and t.nodes)]
    assert a == b


def test_dot_running_example():
    dot = export_dot(running_tape_by_hand())
    assert dot.count("[label=") == 7
    assert dot.count("->") == 8
    assert dot == export_dot(running_tape_by_hand())


def test_dot_golden():
    with open(__file__.replace("test_tape.py", "golden/running.dot")) as fh:
        assert export_dot(running_tape_by_hand()) == fh.read()


def test_dot_single_input():
    t = Tape(["x"])
    tape_record(t, Op.INPUT)
    t.mark_output(0)
    dot = export_dot(t)
    assert dot.count("[label=") == 1 and "->" not in dot


def test_dot_labels():
    dot = export_dot(running_tape_by_hand(), {"inputs": ["a", "b"], "outputs": ["f"]})
    assert 'label="a"' in dot and 'xlabel="f"' in dot


def test_kernel_forward_matches_generic():
    from adtrace.tape import evaluate_arrays

    t = running_tape_by_hand()
    ev = evaluate_arrays(t, [2.0, 5.0])
    forward_sweep(t, [2.0, 5.0])
    assert ev.values.tolist() == [n.value for n in t.nodes]


# every elementary op against central differences of the op itself
OP_DOMAINS = {
    Op.ADD: [(-3, 3), (-3, 3)], Op.SUB: [(-3, 3), (-3, 3)], Op.MUL: [(-3, 3), (-3, 3)],
    Op.DIV: [(-3, 3), (0.5, 3)], Op.POW: [(0.3, 3), (-2, 2)], Op.NEG: [(-3, 3)],
    Op.LN: [(0.1, 5)], Op.EXP: [(-3, 3)], Op.SIN: [(-3, 3)], Op.COS: [(-3, 3)],
    Op.TAN: [(-1.2, 1.2)], Op.SQRT: [(0.1, 5)],
}


@pytest.mark.parametrize("op", list(OP_DOMAINS), ids=lambda o: o.name)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_local_partials_match_finite_differences(op, data):
    args = [data.draw(st.floats(lo, hi)) for lo, hi in OP_DOMAINS[op]]
    value = apply_op(op, args)
    partials = local_partials(op, args, value)
    for k in range(len(args)):
        h = 1e-6 * max(1.0, abs(args[k]))
        up, dn = list(args), list(args)
        up[k] += h
        dn[k] -= h
        fd = (apply_op(op, up) - apply_op(op, dn)) / (2 * h)
        assert abs(partials[k] - fd) <= 1e-7 * max(1.0, abs(fd))


def test_pow_zero_base_partials():
    assert local_partials(Op.POW, [0.0, 2.0], 0.0) == (0.0, 0.0)
    assert local_partials(Op.POW, [0.0, 1.0], 0.0)[0] == 1.0
    # negative base, integer exponent: exponent partial recorded as 0
    d = local_partials(Op.POW, [-2.0, 3.0], -8.0)
    assert d == (12.0, 0.0)


def test_arrays_cached_and_invalidated():
    t = running_tape_by_hand()
    a = t.arrays()
    assert t.arrays() is a
    tape_record(t, Op.EXP, [6])
    assert t.arrays() is not a and t.arrays().size == 8
    assert np.all(t.arrays().p0[:2] == -1)
