"""Hessian-vector products by forward mode applied to a reverse-mode gradient."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .dual import Dual
from .errors import DimensionError, DomainError
from .reverse import reverse_sweep
from .tape import Tape, evaluate_arrays, forward_sweep

MAX_DENSE_N = 32


@dataclass
class HvpRequest:
    inputs: Sequence[float]
    direction: Sequence[float]

    def __post_init__(self):
        for seq, what in ((self.inputs, "inputs"), (self.direction, "direction")):
            if any(isinstance(x, Dual) for x in seq):
                raise TypeError(f"hvp {what} must be plain reals, not Dual (nested tangents unsupported)")
        if len(self.inputs) != len(self.direction):
            raise DimensionError(
                f"direction has length {len(self.direction)}, expected {len(self.inputs)}"
            )


def _tape_at(f, w) -> Tape:
    if isinstance(f, Tape):
        return f
    return f.trace(list(w))


def hvp(f, request: HvpRequest, engine: str = "kernel") -> list[float]:
    """Exact H(w) v for a scalar function ``f`` (a traced function or a tape).

    The reverse sweep runs over dual scalars whose tangents are seeded with
    ``v``: the tangent half of the input adjoints is then d/dt grad f(w + t v)
    at t = 0, i.e. H v. ``engine="kernel"`` stores the duals as split arrays
    and uses :mod:`adtrace.kernels`; ``engine="dual"`` drives the generic
    node-level sweeps with :class:`Dual` objects. Both do the same arithmetic.
    """
    w = [float(x) for x in request.inputs]
    v = [float(x) for x in request.direction]
    tape = _tape_at(f, w)
    if tape.num_inputs != len(w):
        raise DimensionError(f"function takes {tape.num_inputs} inputs, got {len(w)}")
    if tape.num_outputs != 1:
        raise DimensionError("hvp needs a scalar-output function")
    if engine == "kernel":
        out = _hvp_arrays(tape, w, v, kernels.active)
    elif engine == "dual":
        out = _hvp_duals(tape, w, v)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    if not np.all(np.isfinite(out)):
        raise DomainError("Hessian-vector product is not finite at this point")
    return out


def _hvp_arrays(tape, w, v, kern):
    ev = evaluate_arrays(tape, w, kern)
    arr = tape.arrays()
    m = arr.size
    tan = np.empty(m)
    e0 = np.empty(m)
    e1 = np.empty(m)
    kern.tangent_sweep(arr.p0, arr.p1, ev.d0, ev.d1, np.asarray(v), tan)
    kern.partial_tangents(arr.op, arr.p0, arr.p1, ev.values, ev.d0, ev.d1, tan, e0, e1)
    adj = np.zeros(m)
    adj_t = np.zeros(m)
    adj[arr.outputs[0]] = 1.0
    kern.adjoint_sweep_dual(arr.p0, arr.p1, ev.d0, ev.d1, e0, e1, adj, adj_t)
    edges = tape.edge_count()
    tape.counter.tangent_ops += edges
    tape.counter.adjoint_ops += edges
    return adj_t[: tape.num_inputs].tolist()


def _hvp_duals(tape, w, v):
    forward_sweep(tape, [Dual(x, t) for x, t in zip(w, v)])
    adj = reverse_sweep(tape, 0, Dual(1.0, 0.0))
    return [a.tangent if isinstance(a, Dual) else 0.0 for a in adj.inputs]


def dense_hessian(f, inputs: Sequence[float], engine: str = "kernel") -> np.ndarray:
    """n x n Hessian assembled column by column from unit-vector products.

    Only meant as a test oracle; refuses n > 32.
    """
    n = len(inputs)
    if n > MAX_DENSE_N:
        raise DimensionError(f"dense Hessian limited to n <= {MAX_DENSE_N}, got {n}")
    tape = _tape_at(f, inputs)
    H = np.empty((n, n))
    for i in range(n):
        e = [0.0] * n
        e[i] = 1.0
        H[:, i] = hvp(tape, HvpRequest(inputs, e), engine)
    return H
