"""Tape-based automatic differentiation: forward, reverse and nested modes."""

from .dual import Dual
from .elementary import cos, exp, ln, sin, sqrt, tan
from .errors import AdError, ArityError, DimensionError, DomainError, ParseError, TapeError
from .forward import derivative, directional_derivative, forward_directional, jacobian_forward
from .nested import HvpRequest, dense_hessian, hvp
from .reverse import AdjointVector, gradient, jacobian_reverse, reverse_sweep
from .tape import Op, OpCounter, Tape, TraceNode, export_dot, forward_sweep, tape_record
from .tracing import TracedFunction, Var, trace_callable

__version__ = "0.1.0"

__all__ = [
    "AdError", "AdjointVector", "ArityError", "DimensionError", "DomainError", "Dual",
    "HvpRequest", "Op", "OpCounter", "ParseError", "Tape", "TapeError", "TraceNode",
    "TracedFunction", "Var", "cos", "dense_hessian", "derivative", "directional_derivative",
    "exp", "export_dot", "forward_directional", "forward_sweep", "gradient", "hvp",
    "jacobian_forward", "jacobian_reverse", "ln", "reverse_sweep", "sin", "sqrt", "tan",
    "tape_record", "trace_callable",
]
