"""Array kernels for sweeping a compiled tape.

The tape is flattened into parallel arrays: ``op`` (int8 codes below), ``p0``
and ``p1`` (parent indices, -1 when absent) and ``const``. Inputs occupy the
first ``len(x)`` slots. Every kernel is plain Python over numpy arrays; when
numba is importable and ``ADTRACE_DISABLE_NUMBA`` is unset, the same source is
compiled with ``@njit``. Both variants are always reachable through
:data:`python` and :data:`compiled` for benchmarking.

Status codes returned by the forward kernels are ``(node, code)`` with
``node == -1`` on success.
"""

import math
import os

ADD, SUB, MUL, DIV, NEG, POW, LN, EXP, SIN, COS, TAN, SQRT, CONST, INPUT = range(14)

ERR_LN = 1
ERR_SQRT = 2
ERR_DIV = 3
ERR_POW = 4
ERR_NONFINITE = 5
ERR_POW_DERIV = 6

ERROR_MESSAGES = {
    ERR_LN: "ln of a non-positive number",
    ERR_SQRT: "sqrt outside (0, inf)",
    ERR_DIV: "division by zero",
    ERR_POW: "pow outside its domain",
    ERR_NONFINITE: "non-finite result",
    ERR_POW_DERIV: "pow: infinite derivative at zero base",
}


def forward_values(op, p0, p1, const, x, val, d0, d1):
    """Primal values and local partials for every node (store-on-tape)."""
    for i in range(op.shape[0]):
        k = op[i]
        d0[i] = 0.0
        d1[i] = 0.0
        if k == INPUT:
            val[i] = x[i]
            continue
        if k == CONST:
            val[i] = const[i]
            continue
        a = val[p0[i]]
        b = val[p1[i]] if p1[i] >= 0 else 0.0
        if k == ADD:
            y = a + b
            d0[i] = 1.0
            d1[i] = 1.0
        elif k == SUB:
            y = a - b
            d0[i] = 1.0
            d1[i] = -1.0
        elif k == MUL:
            y = a * b
            d0[i] = b
            d1[i] = a
        elif k == DIV:
            if b == 0.0:
                return i, ERR_DIV
            y = a / b
            d0[i] = 1.0 / b
            d1[i] = -y / b
        elif k == NEG:
            y = -a
            d0[i] = -1.0
        elif k == POW:
            if a == 0.0 and b < 0.0:
                return i, ERR_POW
            if a < 0.0 and b != math.floor(b):
                return i, ERR_POW
            y = a ** b
            if a == 0.0:
                if b == 0.0:
                    d0[i] = 0.0
                elif b == 1.0:
                    d0[i] = 1.0
                elif b > 1.0:
                    d0[i] = 0.0
                else:
                    return i, ERR_POW_DERIV
                d1[i] = 0.0
            else:
                d0[i] = b * a ** (b - 1.0)
                d1[i] = y * math.log(a) if a > 0.0 else 0.0
        elif k == LN:
            if a <= 0.0:
                return i, ERR_LN
            y = math.log(a)
            d0[i] = 1.0 / a
        elif k == EXP:
            y = math.exp(a)
            d0[i] = y
        elif k == SIN:
            y = math.sin(a)
            d0[i] = math.cos(a)
        elif k == COS:
            y = math.cos(a)
            d0[i] = -math.sin(a)
        elif k == TAN:
            y = math.tan(a)
            d0[i] = 1.0 + y * y
        else:  # SQRT
            if a <= 0.0:
                return i, ERR_SQRT
            y = math.sqrt(a)
            d0[i] = 0.5 / y
        if not (math.isfinite(y) and math.isfinite(d0[i]) and math.isfinite(d1[i])):
            return i, ERR_NONFINITE
        val[i] = y
    return -1, 0


def tangent_sweep(p0, p1, d0, d1, seed, tan):
    """Forward tangent propagation: tan[i] = sum of partial * parent tangent."""
    n_in = seed.shape[0]
    for i in range(n_in):
        tan[i] = seed[i]
    for i in range(n_in, p0.shape[0]):
        t = 0.0
        if p0[i] >= 0:
            t += d0[i] * tan[p0[i]]
        if p1[i] >= 0:
            t += d1[i] * tan[p1[i]]
        tan[i] = t


def adjoint_sweep(p0, p1, d0, d1, adj):
    """Reverse accumulation in strictly descending node order."""
    for i in range(p0.shape[0] - 1, -1, -1):
        a = adj[i]
        if p0[i] >= 0:
            adj[p0[i]] += a * d0[i]
        if p1[i] >= 0:
            adj[p1[i]] += a * d1[i]


def zero_base_second(b, ta, tb):
    """Tangent of the base partial of ``a ** b`` at ``a == 0``.

    nan marks an infinite second derivative.
    """
    if b == 2.0:
        return 2.0 * ta
    if b == 1.0:
        return 0.0 if tb == 0.0 else math.nan
    if 1.0 < b < 2.0:
        return 0.0 if ta == 0.0 else math.nan
    return 0.0


def partial_tangents(op, p0, p1, val, d0, d1, tan, e0, e1):
    """Directional derivatives of the stored local partials.

    ``tan`` must already hold the node tangents. The results are the tangent
    halves of the partials a Dual-valued forward sweep would have recorded.
    """
    for i in range(op.shape[0]):
        k = op[i]
        e0[i] = 0.0
        e1[i] = 0.0
        if k == INPUT or k == CONST or k == ADD or k == SUB or k == NEG:
            continue
        a = val[p0[i]]
        ta = tan[p0[i]]
        if k == MUL:
            e0[i] = tan[p1[i]]
            e1[i] = ta
        elif k == DIV:
            b = val[p1[i]]
            tb = tan[p1[i]]
            y = val[i]
            e0[i] = -tb / (b * b)
            # d1 = -y / b
            e1[i] = -(tan[i] - y * tb / b) / b
        elif k == POW:
            b = val[p1[i]]
            tb = tan[p1[i]]
            y = val[i]
            if a == 0.0:
                # same cases as zero_base_second; inlined for nopython mode
                if b == 2.0:
                    e0[i] = 2.0 * ta
                elif b == 1.0 and tb != 0.0:
                    e0[i] = math.nan
                elif 1.0 < b < 2.0 and ta != 0.0:
                    e0[i] = math.nan
                continue
            # d0 = b * a**(b - 1)
            c = b - 1.0
            pw = a ** c
            tpw = c * a ** (c - 1.0) * ta
            if a > 0.0:
                tpw += pw * math.log(a) * tb
            e0[i] = tb * pw + b * tpw
            # d1 = y * ln(a) for a > 0, else 0
            if a > 0.0:
                e1[i] = tan[i] * math.log(a) + y * ta / a
        elif k == LN:
            e0[i] = -ta / (a * a)
        elif k == EXP:
            e0[i] = tan[i]
        elif k == SIN:
            e0[i] = -math.sin(a) * ta
        elif k == COS:
            e0[i] = -math.cos(a) * ta
        elif k == TAN:
            e0[i] = 2.0 * val[i] * tan[i]
        else:  # SQRT, d0 = 0.5 / y
            y = val[i]
            e0[i] = -0.5 * tan[i] / (y * y)


def adjoint_sweep_dual(p0, p1, d0, d1, e0, e1, adj, adj_t):
    """Reverse sweep over dual scalars stored as split (primal, tangent) arrays."""
    for i in range(p0.shape[0] - 1, -1, -1):
        a = adj[i]
        at = adj_t[i]
        if p0[i] >= 0:
            adj[p0[i]] += a * d0[i]
            adj_t[p0[i]] += at * d0[i] + a * e0[i]
        if p1[i] >= 0:
            adj[p1[i]] += a * d1[i]
            adj_t[p1[i]] += at * d1[i] + a * e1[i]


class _Kernels:
    def __init__(self, wrap, name):
        self.name = name
        self.forward_values = wrap(forward_values)
        self.tangent_sweep = wrap(tangent_sweep)
        self.adjoint_sweep = wrap(adjoint_sweep)
        self.partial_tangents = wrap(partial_tangents)
        self.adjoint_sweep_dual = wrap(adjoint_sweep_dual)


python = _Kernels(lambda f: f, "python")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

if numba is not None:
    compiled = _Kernels(numba.njit(cache=True), "numba")
else:  # pragma: no cover
    compiled = python


def numba_enabled():
    flag = os.environ.get("ADTRACE_DISABLE_NUMBA", "").strip().lower()
    return numba is not None and flag in ("", "0", "false", "no")


active = compiled if numba_enabled() else python
