"""Gradient descent and Hessian-free Newton-CG driven by reverse-mode gradients."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .nested import HvpRequest, hvp
from .reverse import gradient
from .tape import OpCounter


@dataclass(frozen=True)
class GdConfig:
    step: float = 0.1
    max_iters: int = 1000
    grad_tol: float = 1e-8

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step size must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")


@dataclass(frozen=True)
class NewtonConfig:
    max_iters: int = 100
    grad_tol: float = 1e-8
    cg_rtol: float = 1e-8
    # backtracking on the Newton step; 1.0 is always tried first
    max_halvings: int = 30

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")


@dataclass
class Iterate:
    w: list
    f: float
    grad_inf: float


@dataclass
class OptTrajectory:
    iterates: list = field(default_factory=list)
    termination: str = "max-iters"  # converged | max-iters | domain-error
    gradient_calls: int = 0
    hvp_calls: int = 0
    ops: OpCounter = field(default_factory=OpCounter)
    message: str = ""

    @property
    def final(self) -> Iterate:
        return self.iterates[-1]

    def to_csv(self, names: Sequence[str] | None = None) -> str:
        n = len(self.iterates[0].w) if self.iterates else 0
        names = list(names) if names is not None else [f"w{i + 1}" for i in range(n)]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iter", "f", "grad_inf_norm", *names])
        for k, it in enumerate(self.iterates):
            writer.writerow([k, repr(it.f), repr(it.grad_inf), *(repr(x) for x in it.w)])
        return buf.getvalue()


class _Objective:
    """Value and gradient of a traced scalar function, with bookkeeping."""

    def __init__(self, f, traj: OptTrajectory):
        self.f = f
        self.traj = traj

    def tape(self, w):
        tape = self.f.trace(list(w))
        if tape.num_outputs != 1:
            raise ValueError("optimizers need a scalar-output function")
        return tape

    def value_grad(self, w):
        tape = self.tape(w)
        g = np.asarray(gradient(tape, list(w)))
        self.traj.gradient_calls += 1
        self._absorb(tape)
        return tape.nodes[tape.output_indices[0]].value, g, tape

    def value(self, w):
        tape = self.tape(w)
        self._absorb(tape)
        return tape.nodes[tape.output_indices[0]].value

    def hvp(self, tape, w, v):
        self.traj.hvp_calls += 1
        before = tape.counter.snapshot()
        out = np.asarray(hvp(tape, HvpRequest(list(w), list(v))))
        delta = tape.counter - before
        self.traj.ops.tangent_ops += delta.tangent_ops
        self.traj.ops.adjoint_ops += delta.adjoint_ops
        self.traj.ops.primal_ops += delta.primal_ops
        return out

    def _absorb(self, tape):
        c = tape.counter
        self.traj.ops.primal_ops += c.primal_ops
        self.traj.ops.tangent_ops += c.tangent_ops
        self.traj.ops.adjoint_ops += c.adjoint_ops
        c.reset()


def gradient_descent(f, w0: Sequence[float], config: GdConfig = GdConfig()) -> OptTrajectory:
    """Fixed-step steepest descent, w <- w - step * grad f(w)."""
    traj = OptTrajectory()
    obj = _Objective(f, traj)
    w = np.asarray(w0, dtype=np.float64)
    try:
        for k in range(config.max_iters + 1):
            fw, g, _ = obj.value_grad(w)
            gnorm = float(np.max(np.abs(g))) if g.size else 0.0
            traj.iterates.append(Iterate(w.tolist(), fw, gnorm))
            if gnorm < config.grad_tol:
                traj.termination = "converged"
                return traj
            if k == config.max_iters:
                break
            w = w - config.step * g
            if not np.all(np.isfinite(w)):
                raise DomainError("iterate is no longer finite")
    except DomainError as exc:
        traj.termination = "domain-error"
        traj.message = str(exc)
        return traj
    traj.termination = "max-iters"
    return traj


def conjugate_gradient(apply_h, g: np.ndarray, rtol: float = 1e-8, max_iters: int | None = None):
    """Approximately solve H d = -g using only products with H.

    Stops at relative residual ``rtol`` or after n iterations. On non-positive
    curvature the current d is returned, or -g if that happens on the first
    iteration. Returns (d, iterations, hit_negative_curvature).
    """
    n = g.shape[0]
    max_iters = n if max_iters is None else max_iters
    d = np.zeros(n)
    r = -g.copy()
    p = r.copy()
    rr = float(r @ r)
    r0 = math.sqrt(rr)
    if r0 == 0.0:
        return d, 0, False
    for it in range(max_iters):
        hp = apply_h(p)
        curv = float(p @ hp)
        if curv <= 0.0:
            return (d if it > 0 else -g.copy()), it, True
        alpha = rr / curv
        d = d + alpha * p
        r = r - alpha * hp
        rr_new = float(r @ r)
        if math.sqrt(rr_new) <= rtol * r0:
            return d, it + 1, False
        p = r + (rr_new / rr) * p
        rr = rr_new
    return d, max_iters, False


def newton_cg(f, w0: Sequence[float], config: NewtonConfig = NewtonConfig()) -> OptTrajectory:
    """Hessian-free Newton: CG on H d = -g with Hessian-vector products only.

    The full Newton step is tried first and halved until f decreases (Armijo
    condition with c = 1e-4).
    """
    traj = OptTrajectory()
    obj = _Objective(f, traj)
    w = np.asarray(w0, dtype=np.float64)
    try:
        for k in range(config.max_iters + 1):
            fw, g, tape = obj.value_grad(w)
            gnorm = float(np.max(np.abs(g))) if g.size else 0.0
            traj.iterates.append(Iterate(w.tolist(), fw, gnorm))
            if gnorm < config.grad_tol:
                traj.termination = "converged"
                return traj
            if k == config.max_iters:
                break
            d, _, _ = conjugate_gradient(lambda v: obj.hvp(tape, w, v), g, config.cg_rtol)
            slope = float(g @ d)
            if slope >= 0.0:
                d = -g
                slope = -float(g @ g)
            t = 1.0
            for _ in range(config.max_halvings):
                try:
                    trial = obj.value(w + t * d)
                except DomainError:
                    trial = math.inf
                if trial <= fw + 1e-4 * t * slope:
                    break
                t *= 0.5
            else:
                # no decrease found at any step length; the gradient is at noise level
                traj.termination = "converged" if gnorm < 1e3 * config.grad_tol else "max-iters"
                traj.message = "line search failed"
                return traj
            w = w + t * d
    except DomainError as exc:
        traj.termination = "domain-error"
        traj.message = str(exc)
        return traj
    traj.termination = "max-iters"
    return traj
