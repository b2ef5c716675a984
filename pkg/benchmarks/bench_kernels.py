"""Time the pure-Python and numba-compiled tape kernels on the same tapes.

    python3 benchmarks/bench_kernels.py [--sizes 1000 10000 100000] [--repeat 5]

Each row is one kernel on a chain-shaped tape of the given number of working
nodes; times are the best of ``--repeat`` runs, after one untimed warm-up
call so compilation is excluded. Results of both backends are checked to
agree (to a few ulps; compiled sin/cos may round differently) before timing.
"""

import argparse
import time

import numpy as np

from adtrace import TracedFunction, kernels, sin
from adtrace.tape import evaluate_arrays


def chain_tape(n_inputs):
    def f(*x):
        acc = x[0]
        for v in x[1:]:
            acc = sin(acc + v) * v
        return acc

    x = np.linspace(-0.9, 0.8, n_inputs).tolist()
    return TracedFunction.from_callable(f, n_inputs).trace(x), x


def _runners(tape, x, kern):
    arr = tape.arrays()
    ev = evaluate_arrays(tape, x, kernels.python)
    seed = np.ones(tape.num_inputs)
    m = arr.size

    def forward():
        val, d0, d1 = np.empty(m), np.empty(m), np.empty(m)
        kern.forward_values(arr.op, arr.p0, arr.p1, arr.const, np.asarray(x), val, d0, d1)
        return val

    def tangent():
        tan = np.empty(m)
        kern.tangent_sweep(arr.p0, arr.p1, ev.d0, ev.d1, seed, tan)
        return tan

    def adjoint():
        adj = np.zeros(m)
        adj[arr.outputs[0]] = 1.0
        kern.adjoint_sweep(arr.p0, arr.p1, ev.d0, ev.d1, adj)
        return adj

    def hvp():
        tan, e0, e1 = np.empty(m), np.empty(m), np.empty(m)
        kern.tangent_sweep(arr.p0, arr.p1, ev.d0, ev.d1, seed, tan)
        kern.partial_tangents(arr.op, arr.p0, arr.p1, ev.values, ev.d0, ev.d1, tan, e0, e1)
        adj, adj_t = np.zeros(m), np.zeros(m)
        adj[arr.outputs[0]] = 1.0
        kern.adjoint_sweep_dual(arr.p0, arr.p1, ev.d0, ev.d1, e0, e1, adj, adj_t)
        return adj_t

    return {"forward_values": forward, "tangent_sweep": tangent, "adjoint_sweep": adjoint, "hvp": hvp}


def best_time(fn, repeat):
    fn()  # warm-up (triggers compilation for the numba backend)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000],
                        help="number of chain links (inputs); the tape has about 3x as many working nodes")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if kernels.compiled is kernels.python:
        print("numba is not installed; nothing to compare")
        return 1

    print(f"{'links':>8} {'nodes':>8} {'kernel':<15} {'python [ms]':>12} {'numba [ms]':>11} {'speed-up':>9}")
    for n in args.sizes:
        tape, x = chain_tape(n)
        slow = _runners(tape, x, kernels.python)
        fast = _runners(tape, x, kernels.compiled)
        for name in slow:
            a, b = slow[name](), fast[name]()
            if not np.allclose(a, b, rtol=1e-9, atol=1e-12):
                raise SystemExit(f"backends disagree on {name} at n={n}")
            tp = best_time(slow[name], args.repeat)
            tn = best_time(fast[name], args.repeat)
            print(f"{n:>8} {len(tape):>8} {name:<15} {tp * 1e3:>12.2f} {tn * 1e3:>11.3f} {tp / tn:>8.0f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
