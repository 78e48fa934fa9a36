"""Time the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-N wall time per kernel and backend, plus the speedup.
"""
import argparse
import time

import numpy as np

from honeycar import kernels


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cases():
    rng = np.random.default_rng(0)
    v = rng.normal(size=1000)
    gamma3 = np.array([2.0, 3.0, 1.0])
    psi3 = np.array([2.0, 1.0, 3.0])
    gamma4 = np.array([2.0, 3.0, 1.0, 2.0])
    psi4 = np.array([2.0, 1.0, 3.0, 2.0])
    gamma8 = 4.0 - rng.integers(1, 4, size=8).astype(float)
    starts = [np.full(3, 1 / 3), *np.eye(3), *rng.dirichlet(np.ones(3), size=32)]
    p = np.array([0.332, 0.304, 0.364])
    t = 4.0 - gamma3
    u_incl = rng.random((100_000, 3))
    u_choice = rng.random(100_000)

    def multistart(b):
        for x0 in starts:
            b.local_descent(gamma3, psi3, 0.5, 0.5, x0, 5000, 1e-9)

    return {
        "project_simplex n=1000": lambda b: b.project_simplex(v),
        "multistart HCG-b n=3 (36 starts)": multistart,
        "grid search n=4 step 0.01": lambda b: b.grid_search(gamma4, psi4, 0.5, 0.5, 100),
        "subgradient descent n=8": lambda b: b.subgradient_descent(gamma8, np.full(8, 1 / 8), 5000, 1e-9),
        "sample_rounds 1e5 rounds": lambda b: b.sample_rounds(p, gamma3, t, u_incl, u_choice, kernels.BEST_RESPONSE),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; timing the Python fallback only")
    names = sorted(backends)
    print(f"{'kernel':36s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in cases().items():
        times = {n: best_time(lambda: fn(backends[n]), args.repeat) for n in names}
        line = f"{label:36s}" + "".join(f"{times[n] * 1e3:10.3f}ms" for n in names)
        if len(names) == 2:
            line += f"{times['python'] / times['cython']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
