#!/usr/bin/env python3
"""Benchmark the pure-NumPy kernels against the compiled core.

Times the individual hot kernels and a full solver step at the production
resolution (nx = 300).  Run from the repository root:

    python benchmarks/bench_backends.py [n_steps]
"""

import sys
import time

import numpy as np

from nsk1d._kernels import get_backend


def bench(fn, *args, repeat=5000):
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat * 1e6


def step_time(backend_name, n_steps):
    import importlib
    import os

    os.environ["NSK1D_BACKEND"] = backend_name
    import nsk1d._kernels as kern

    importlib.reload(kern)
    import nsk1d.solver as solver

    importlib.reload(solver)
    cfg = solver.SimConfig(nx=300, dt=1 / 120000, t_end=1.0, eps=1e-4, mu_bar=1e-3,
                           init="sine")
    state = solver.initial_state(cfg)
    for _ in range(50):
        state = solver.strang_step(state, cfg)
    t0 = time.perf_counter()
    for _ in range(n_steps):
        state = solver.strang_step(state, cfg)
    return (time.perf_counter() - t0) / n_steps * 1e6


def main():
    n_steps = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
    nx = 300
    h = 1.0 / nx
    x = np.arange(nx) / nx
    v = 1.5 + 0.3 * np.sin(2 * np.pi * x)
    d = 0.6 * np.pi * np.cos(2 * np.pi * x)
    uv = 0.1 * np.cos(2 * np.pi * x)
    ud = -0.2 * np.pi * np.sin(2 * np.pi * x)
    w2 = 3.0 * v * v - 9.0 * v + 6.5
    w3 = 6.0 * v - 9.0

    backends = {}
    for name in ("pure", "cython"):
        try:
            backends[name] = get_backend(name)
        except ImportError:
            print(f"backend {name}: not available")

    rows = []
    cases = [
        ("interp_eval", lambda B: bench(B.interp_eval, v, d, h, x)),
        ("trace_rk4", lambda B: bench(B.trace_rk4, uv, ud, h, 4e-6, x)),
        ("d2_array", lambda B: bench(B.d2_array, v, d, h)),
        ("d4_array", lambda B: bench(B.d4_array, v, d, h)),
        ("source_terms", lambda B: bench(B.source_terms, v, d, uv, ud, h, 1e-4, 0.1, w2, w3)),
        ("advect_stage", lambda B: bench(B.advect_stage, v, d, uv, ud, h, 4e-6)),
    ]
    print(f"{'kernel':>14s}" + "".join(f"{n:>12s}" for n in backends) + f"{'speedup':>10s}")
    for label, runner in cases:
        times = {n: runner(B) for n, B in backends.items()}
        speed = times.get("pure", float("nan")) / times.get("cython", float("nan"))
        print(f"{label:>14s}" + "".join(f"{times[n]:>10.1f}us" for n in backends)
              + f"{speed:>9.1f}x")

    print(f"\nfull strang step at nx=300 ({n_steps} steps per backend):")
    times = {}
    for name in backends:
        times[name] = step_time(name, n_steps)
        print(f"  {name:>7s}: {times[name]:8.1f} us/step")
    if len(times) == 2:
        print(f"  speedup: {times['pure'] / times['cython']:.1f}x")


if __name__ == "__main__":
    main()
