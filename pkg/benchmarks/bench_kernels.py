"""Compiled vs pure-Python kernels: residual evaluation, lower hull and a full solve.

Run with ``python3 benchmarks/bench_kernels.py``. The full-solve timings run
in subprocesses so that CUTOFFOT_PURE_PYTHON can select the backend at import.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from cutoffot.ma import Grid, Problem, Rectangle, kernels
from cutoffot.oracles import make_manufactured

SOLVE_SNIPPET = """
import time
from cutoffot.ma import BACKEND, Grid, Rectangle, solve_scheme
from cutoffot.oracles import make_manufactured
case = make_manufactured("quartic_bump")
grid = Grid(case.X[0], case.X[1], {h})
t = time.perf_counter()
sol = solve_scheme(case.f0, case.f1, Rectangle(*case.Y), grid)
print(BACKEND, time.perf_counter() - t, sol.iterations)
"""


def best_of(fn, repeat=5, number=None):
    timer = timeit.Timer(fn)
    if number is None:
        number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def residual_table(ns):
    case = make_manufactured("quartic_bump")
    print(f"{'nodes':>8} {'python ms':>10} {'compiled ms':>12} {'speedup':>8}")
    for n in ns:
        grid = Grid(case.X[0], case.X[1], 1.0 / n)
        prob = Problem(grid, case.f0, case.f1, Rectangle(*case.Y))
        u = case.u(grid.points())
        tp = best_of(lambda: prob.residual(u, backend="python"))
        tc = best_of(lambda: prob.residual(u, backend="compiled"))
        diff = np.max(np.abs(prob.residual(u, backend="python") - prob.residual(u, backend="compiled")))
        print(f"{grid.size:8d} {1e3 * tp:10.3f} {1e3 * tc:12.3f} {tp / tc:8.1f}   max diff {diff:.1e}")


def hull_table(sizes):
    rng = np.random.default_rng(0)
    py = kernels.backend_module("python")
    cc = kernels.backend_module("compiled")
    print(f"{'points':>8} {'python ms':>10} {'compiled ms':>12} {'speedup':>8}")
    for m in sizes:
        x = np.sort(rng.uniform(-1, 1, m))
        g = x**2 + 0.1 * rng.normal(size=m)
        tp = best_of(lambda: py.lower_hull(x, g))
        tc = best_of(lambda: cc.lower_hull(x, g))
        print(f"{m:8d} {1e3 * tp:10.3f} {1e3 * tc:12.3f} {tp / tc:8.1f}")


def solve_table(hs):
    print(f"{'h':>8} {'backend':>9} {'seconds':>8} {'iters':>6}")
    for h in hs:
        for pure in ("1", "0"):
            env = dict(os.environ, CUTOFFOT_PURE_PYTHON=pure)
            out = subprocess.run([sys.executable, "-c", SOLVE_SNIPPET.format(h=h)], env=env,
                                 capture_output=True, text=True, check=True).stdout.split()
            print(f"{h:8.5f} {out[0]:>9} {float(out[1]):8.3f} {out[2]:>6}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--quick", action="store_true", help="smaller sizes")
    args = ap.parse_args(argv)
    if kernels.BACKEND != "compiled":
        sys.exit("compiled extension not available; build with pip install -e . --no-build-isolation")
    ns = (16, 32) if args.quick else (16, 32, 64, 128)
    residual_table(ns)
    print()
    hull_table((1_000, 10_000) if args.quick else (1_000, 10_000, 100_000))
    print()
    solve_table((1 / 16, 1 / 32) if args.quick else (1 / 16, 1 / 32, 1 / 64))


if __name__ == "__main__":
    main()
