import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

RUNNING = "ln(x1) + x1*x2 - sin(x2)"
RUNNING_POINT = [2.0, 5.0]

_acceptance_lines = []


@pytest.fixture
def report():
    """Record a one-line verdict for the acceptance summary."""

    def add(number, title, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        _acceptance_lines.append((number, f"[{status}] criterion {number}: {title}" + (f" ({detail})" if detail else "")))

    return add


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_acceptance_lines):
        terminalreporter.write_line(line)


@pytest.fixture
def running_tape():
    from adtrace.lang.parser import parse
    from adtrace.lang.tracer import trace

    return trace(parse(RUNNING), RUNNING_POINT)
