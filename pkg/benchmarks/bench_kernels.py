"""Compiled vs numpy frequency-sweep kernels on the stationary ten-phonon spectrum.

    python benchmarks/bench_kernels.py [--repeat 3] [--threads 0] [--t 20]

Prints the best wall time per kernel and the maximum relative difference
between implementations.
"""
import argparse
import time

import numpy as np

from omcspec import Branch, FilterSpec, SystemParams, decompose, generator, kernels, make_initial_state
from omcspec.spectrum import _branch_alpha, _outer_grid, _refinement, DEFAULT_N_STEPS, DEFAULT_QUAD_STEP, stepped_series


def inputs(t):
    p = SystemParams()
    filt = FilterSpec()
    psi0 = make_initial_state(Branch.ATOM_EXCITED, 0, p)
    cache = decompose(generator(p))
    n = p.n_phonon
    alpha = _branch_alpha(p, filt.gamma)
    grid, w = _outer_grid(t, DEFAULT_N_STEPS)
    wout = w * np.exp(-filt.gamma * grid)
    closed = (filt.delta_grid, alpha, cache.eigenvalues, cache.modal(psi0)[n:], grid, wout)
    r = _refinement(grid[1] - grid[0], DEFAULT_QUAD_STEP)
    tfine = np.linspace(0.0, t, (grid.size - 1) * r + 1)
    series = stepped_series(generator(p).entries, psi0.amps, tfine[1], tfine.size)
    qT = series[:, n:] * np.exp(np.outer(tfine, alpha))
    return closed, (filt.delta_grid, qT, tfine, r, wout)


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=0, help="0 = all available cores")
    ap.add_argument("--t", type=float, default=20.0, help="spectrum time")
    args = ap.parse_args()
    closed, quad = inputs(args.t)
    impls = {"python": kernels.load("python")}
    try:
        impls["cython"] = kernels.load("cython")
    except ImportError:
        print("compiled kernels not built; timing the numpy path only")
    results = {}
    print(f"{'kernel':<14}{'impl':<10}{'best [s]':>10}")
    for kname, kargs in (("closed_counts", closed), ("quad_counts", quad)):
        for iname, mod in impls.items():
            fn = getattr(mod, kname)
            dt, out = best_of(lambda: fn(*kargs, False, args.threads), args.repeat)
            results[(kname, iname)] = (dt, out)
            print(f"{kname:<14}{iname:<10}{dt:>10.3f}")
        if len(impls) == 2:
            (tp, a), (tc, b) = results[(kname, "python")], results[(kname, "cython")]
            rel = np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300))
            print(f"{'':<14}speed-up {tp / tc:5.2f}x, max rel diff {rel:.1e}")


if __name__ == "__main__":
    main()
