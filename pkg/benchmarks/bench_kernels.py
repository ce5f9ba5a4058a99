#!/usr/bin/env python3
"""Benchmark the hot kernels: compiled extension vs numpy fallback.

Times the banded convolution, the Neumann-series resolvent, and one full
outer solve on each backend, and prints the speedups.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

import mesofick as mf
from mesofick import _core_py, backend
from mesofick.macroscopic import auxiliary_field, current, solve_macroscopic

try:
    from mesofick import _core
except ImportError:
    _core = None


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_convolve(impl, kernel, f, loops=200):
    band = kernel.band
    am = kernel.a_minus.values
    ap = kernel.a_plus.values

    def run():
        for _ in range(loops):
            impl.band_convolve(band, am, ap, f, f[0], f[-1])
    return run


def bench_resolvent(impl, kernel, p, g, loops=5):
    band = kernel.band
    am = kernel.a_minus.values
    ap = kernel.a_plus.values

    def run():
        for _ in range(loops):
            impl.neumann_resolvent(band, am, ap, p, g, 1e-13, 100000)
    return run


def bench_outer_solve(params, grid, kernel, impl):
    def run():
        backend.band_convolve = impl.band_convolve
        backend.neumann_resolvent = impl.neumann_resolvent
        try:
            mf.outer_solve(params, grid, kernel)
        finally:
            backend.band_convolve = backend._impl.band_convolve
            backend.neumann_resolvent = backend._impl.neumann_resolvent
    return run


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _core is None:
        print("compiled extension not built; showing fallback timings only")
    impls = [("python", _core_py)] + ([("compiled", _core)] if _core else [])

    print(f"{'case':<34} " + "".join(f"{name:>12} " for name, _ in impls)
          + ("speedup" if _core else ""))
    for eps, npu in ((1 / 50, 20), (1 / 200, 20)):
        grid = mf.Grid(eps, npu)
        kernel = mf.build_kernel(grid)
        params = mf.ModelParams(beta=1.25, mu_minus=0.8, mu_plus=0.7,
                                epsilon=eps)
        rng = np.random.default_rng(0)
        f = rng.uniform(-1.0, 1.0, grid.n_nodes)
        m0 = solve_macroscopic(params, grid)
        p = mf.susceptibility(params.beta, m0.values)
        j = current(params.beta, 0.8, 0.7)
        g = auxiliary_field(params, grid, m0, j).values

        cases = [
            (f"convolve x200     (n={grid.n_nodes})", bench_convolve, (kernel, f)),
            (f"series resolvent x5 (n={grid.n_nodes})", bench_resolvent,
             (kernel, p, g)),
        ]
        for label, factory, extra in cases:
            times = [timeit(factory(impl, *extra), args.repeats)
                     for _, impl in impls]
            row = f"{label:<34} " + "".join(f"{t * 1e3:>10.2f}ms " for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:>6.1f}x"
            print(row)

        times = [timeit(bench_outer_solve(params, grid, kernel, impl),
                        args.repeats) for _, impl in impls]
        row = f"{f'full outer solve  (n={grid.n_nodes})':<34} " \
            + "".join(f"{t * 1e3:>10.2f}ms " for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
