"""Compare the compiled and pure-Python row-reduction kernels over F_p.

    python3 benchmarks/bench_kernels.py [--sizes 20 60 120] [--repeat 3]
"""
import argparse
import time

import numpy as np

from levelforge import _kernels_py
from levelforge.exactlin import PRIME

try:
    from levelforge import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_time(fn, a, repeat):
    best = float("inf")
    for _ in range(repeat):
        b = a.copy()
        t = time.perf_counter()
        piv = fn(b, PRIME)
        best = min(best, time.perf_counter() - t)
    return best, b, piv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 60, 120, 200])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print(f"p = {PRIME}")
    print(f"{'n':>5} {'python [s]':>12} {'cython [s]':>12} {'speedup':>9}")
    for n in args.sizes:
        a = np.ascontiguousarray(rng.integers(0, PRIME, size=(n, n + n // 2), dtype=np.int64))
        tp, bp, pp = best_time(_kernels_py.rref_inplace, a, args.repeat)
        if _kernels is None:
            print(f"{n:>5} {tp:>12.4f} {'n/a':>12} {'n/a':>9}")
            continue
        tc, bc, pc = best_time(_kernels.rref_inplace, a, args.repeat)
        assert list(pp) == list(pc) and np.array_equal(bp, bc), "backends disagree"
        print(f"{n:>5} {tp:>12.4f} {tc:>12.4f} {tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
