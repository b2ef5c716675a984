import os
import re

import pytest

from adtrace.lang.parser import parse
from adtrace.lang.tracer import trace
from adtrace.printing import adjoint_steps, format_adjoint_trace, format_forward_trace
from conftest import RUNNING, RUNNING_POINT

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def golden(name):
    with open(os.path.join(GOLDEN, name), encoding="utf-8") as fh:
        return fh.read()


def values(text, section):
    """Map row label -> printed value for one section of a listing."""
    block = text.split(section, 1)[1].split("\n\n", 1)[0]
    out = {}
    for line in block.strip().splitlines()[1:] if block.startswith(" (") else block.strip().splitlines():
        m = re.match(r"\s*(\S+)\s+=.*=\s+(\S+)$", line)
        if m:
            out.setdefault(m.group(1), []).append(m.group(2))
    return out


def test_forward_listing_golden(running_tape):
    assert format_forward_trace(running_tape, RUNNING_POINT, [1.0, 0.0]) == golden("table1_forward.txt")


def test_adjoint_listing_golden(running_tape):
    assert format_adjoint_trace(running_tape, RUNNING_POINT) == golden("table2_adjoint.txt")


def test_table1_columns(running_tape):
    text = format_forward_trace(running_tape, RUNNING_POINT, [1.0, 0.0])
    primal = values(text, "Forward evaluation trace")
    tangent = values(text, "Forward derivative trace")
    assert [primal[k][0] for k in ("v-1", "v0", "v1", "v2", "v3", "v4", "v5", "y")] == [
        "2.0000", "5.0000", "0.6931", "10.0000", "-0.9589", "10.6931", "11.6521", "11.6521"]
    assert [tangent[k][0] for k in ("dv-1", "dv0", "dv1", "dv2", "dv3", "dv4", "dv5", "dy")] == [
        "1.0000", "0.0000", "0.5000", "5.0000", "0.0000", "5.5000", "5.5000", "5.5000"]


def test_table2_rows(running_tape):
    text = format_adjoint_trace(running_tape, RUNNING_POINT)
    rows = values(text, "Reverse adjoint trace")
    assert rows["bv5"] == ["1.0000"]
    assert rows["bv4"] == ["1.0000"] and rows["bv3"] == ["-1.0000"]
    assert rows["bv1"] == ["1.0000"] and rows["bv2"] == ["1.0000"]
    # v0 receives -0.2837 first, then accumulates to 1.7163
    assert rows["bv0"] == ["-0.2837", "1.7163"]
    assert rows["bv-1"] == ["5.0000", "5.5000"]
    assert rows["bx1"] == ["5.5000"] and rows["bx2"] == ["1.7163"]
    assert "bv0  = bv0 + bv2 * v-1" in text


def test_adjoint_steps_mark_increments(running_tape):
    from adtrace import forward_sweep

    forward_sweep(running_tape, RUNNING_POINT)
    steps, adj = adjoint_steps(running_tape)
    increments = [(p, i) for p, i, _, inc, _ in steps if inc]
    assert increments == [(1, 3), (0, 2)]
    assert adj[0] == pytest.approx(5.5)


def test_precision_option(running_tape):
    text = format_forward_trace(running_tape, RUNNING_POINT, precision=2)
    assert "11.65" in text and "11.652" not in text


def test_constants_show_by_value():
    tape = trace(parse("2 * x + 1"), [3.0])
    text = format_forward_trace(tape, [3.0], [1.0])
    assert "v2 = 2 * v0" in text and "dv2 = 2 * dv0" in text
