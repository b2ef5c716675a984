"""Reverse-mode accumulation: adjoints swept from an output back to the inputs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import kernels
from .errors import DimensionError, TapeError
from .tape import Tape, evaluate_arrays


@dataclass
class AdjointVector:
    """One adjoint per tape node; the first ``num_inputs`` entries are the gradient."""

    adjoints: list
    num_inputs: int

    @property
    def inputs(self) -> list:
        return self.adjoints[: self.num_inputs]

    def __getitem__(self, i):
        return self.adjoints[i]

    def __len__(self):
        return len(self.adjoints)


def reverse_sweep(tape: Tape, output_index: int = 0, output_seed: Any = 1.0) -> AdjointVector:
    """Propagate adjoints over an already forward-swept tape.

    Scalar-generic: values, partials and the seed may be floats or any type
    supporting ``+`` and ``*`` (the nested Hessian-vector product runs this
    with duals). ``output_index`` selects which of the tape's outputs is
    seeded.
    """
    if not 0 <= output_index < tape.num_outputs:
        raise TapeError(f"output {output_index} out of range (tape has {tape.num_outputs})")
    if not tape.is_evaluated:
        raise TapeError("reverse sweep before forward sweep: node values are unpopulated")
    nodes = tape.nodes
    adj: list = [0.0] * len(nodes)
    adj[tape.output_indices[output_index]] = output_seed
    ops = 0
    for i in range(len(nodes) - 1, -1, -1):
        node = nodes[i]
        a = adj[i]
        for p, d in zip(node.parents, node.partials):
            adj[p] = adj[p] + a * d
        ops += len(node.parents)
    tape.counter.adjoint_ops += ops
    return AdjointVector(adj, tape.num_inputs)


def gradient(tape: Tape, inputs: Sequence[float], kern=None) -> list[float]:
    """All n partials of a scalar-output tape from one forward and one reverse sweep."""
    if tape.num_outputs != 1:
        raise DimensionError(
            f"gradient needs a single-output tape, this one has {tape.num_outputs}; use jacobian_reverse"
        )
    return _reverse_rows(tape, inputs, kern)[0].tolist()


def jacobian_reverse(tape: Tape, inputs: Sequence[float], kern=None) -> np.ndarray:
    """m x n Jacobian, one reverse sweep per output (row)."""
    return _reverse_rows(tape, inputs, kern)


def _reverse_rows(tape, inputs, kern):
    kern = kern or kernels.active
    ev = evaluate_arrays(tape, inputs, kern)
    arr = tape.arrays()
    edges = tape.edge_count()
    jac = np.empty((len(arr.outputs), tape.num_inputs))
    adj = np.empty(arr.size)
    for j, out in enumerate(arr.outputs):
        adj[:] = 0.0
        adj[out] = 1.0
        kern.adjoint_sweep(arr.p0, arr.p1, ev.d0, ev.d1, adj)
        tape.counter.adjoint_ops += edges
        jac[j] = adj[: tape.num_inputs]
    return jac
