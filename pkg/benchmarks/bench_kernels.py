"""Time the numba and numpy metric kernels side by side.

    python3 benchmarks/bench_kernels.py [--repeat N] [--seed S]

Both backends are imported from the same module, so one run compares them
regardless of EVCOREF_NUMBA. The first numba call (compilation or cache
load) is timed separately and excluded from the per-call figures.
"""

import argparse
import time

import numpy as np

from evcoref import _kernels


def _best(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def contingency_cases(rng, sizes):
    for n in sizes:
        k = max(1, int(n ** 0.5) // 2)
        yield n, (rng.integers(0, k, n), rng.integers(0, k, n), k, k)


def assignment_cases(rng, sizes):
    for n in sizes:
        # overlap counts look like a sparse non-negative integer matrix
        w = rng.poisson(0.3, (n, n + n // 4)).astype(np.float64)
        yield n, (w,)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy path can run")
        return 1

    t0 = time.perf_counter()
    _kernels.contingency_numba(np.zeros(1, np.int64), np.zeros(1, np.int64), 1, 1)
    _kernels.assignment_numba(np.ones((2, 2)))
    print(f"numba warm-up (compile or cache load): {time.perf_counter() - t0:.2f} s\n")

    print(f"{'kernel':<12} {'size':>7} {'numba ms':>10} {'numpy ms':>10} {'ratio':>7}")
    table = [
        ("contingency", contingency_cases(rng, (1_000, 10_000, 100_000, 1_000_000)),
         _kernels.contingency_numba, _kernels.contingency_numpy),
        ("assignment", assignment_cases(rng, (10, 50, 100, 200)),
         _kernels.assignment_numba, _kernels.assignment_numpy),
    ]
    for name, cases, fast, slow in table:
        for n, case in cases:
            a = _best(fast, case, args.repeat)
            b = _best(slow, case, args.repeat)
            if name == "assignment":
                assert abs(fast(*case)[1] - slow(*case)[1]) < 1e-9
            else:
                assert np.array_equal(fast(*case), slow(*case))
            print(f"{name:<12} {n:>7} {a * 1e3:>10.3f} {b * 1e3:>10.3f} {b / a:>7.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
