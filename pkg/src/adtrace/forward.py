"""Forward-mode accumulation.

Two routes that must agree: :class:`~adtrace.dual.Dual` arithmetic applied to
ordinary Python callables (:func:`directional_derivative`), and a tangent
sweep over a recorded tape (:func:`forward_directional`). The tape route is
what the other modules build on.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from . import kernels
from .dual import Dual
from .errors import DimensionError
from .tape import Tape, evaluate_arrays


def _seed_array(seed, n):
    seed = np.asarray(seed, dtype=np.float64)
    if seed.shape != (n,):
        raise DimensionError(f"seed must have length {n}, got shape {seed.shape}")
    return seed


def forward_directional(tape: Tape, inputs: Sequence[float], seed: Sequence[float], kern=None):
    """Outputs and output tangents for one seed direction.

    Returns ``(outputs, output_tangents)``; the tangents are the Jacobian
    applied to ``seed``.
    """
    kern = kern or kernels.active
    seed = _seed_array(seed, tape.num_inputs)
    ev = evaluate_arrays(tape, inputs, kern)
    arr = tape.arrays()
    tan = np.empty(arr.size)
    kern.tangent_sweep(arr.p0, arr.p1, ev.d0, ev.d1, seed, tan)
    tape.counter.tangent_ops += tape.edge_count()
    return ev.outputs.tolist(), tan[arr.outputs].tolist()


def jacobian_forward(tape: Tape, inputs: Sequence[float], kern=None) -> np.ndarray:
    """m x n Jacobian, one tangent sweep per input (column)."""
    kern = kern or kernels.active
    n = tape.num_inputs
    ev = evaluate_arrays(tape, inputs, kern)
    arr = tape.arrays()
    edges = tape.edge_count()
    jac = np.empty((len(arr.outputs), n))
    tan = np.empty(arr.size)
    for i in range(n):
        seed = np.zeros(n)
        seed[i] = 1.0
        kern.tangent_sweep(arr.p0, arr.p1, ev.d0, ev.d1, seed, tan)
        tape.counter.tangent_ops += edges
        jac[:, i] = tan[arr.outputs]
    return jac


def directional_derivative(fn: Callable, inputs: Sequence[float], seed: Sequence[float]):
    """Evaluate ``fn`` on duals ``inputs + eps * seed``.

    ``fn`` takes one argument per input and returns a scalar or a sequence.
    Returns ``(outputs, tangents)`` as lists.
    """
    if len(seed) != len(inputs):
        raise DimensionError("seed and inputs differ in length")
    out = fn(*[Dual(x, s) for x, s in zip(inputs, seed)])
    if not isinstance(out, (list, tuple)):
        out = [out]
    values, tangents = [], []
    for y in out:
        if isinstance(y, Dual):
            values.append(y.primal)
            tangents.append(y.tangent)
        else:
            values.append(float(y))
            tangents.append(0.0)
    return values, tangents


def derivative(fn: Callable, x: float) -> float:
    """d fn / dx at ``x`` for a scalar function of one variable."""
    _, t = directional_derivative(fn, [x], [1.0])
    return t[0]
