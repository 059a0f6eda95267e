"""Compare the compiled and pure-Python leakage kernels.

    python benchmarks/bench_kernel.py --rows 200 --cols 40 --repeat 3

Rows share full support, so no pair reaches the box bound and the pair
loop runs to completion (the worst case for both backends).
"""
import argparse
import time

import numpy as np

from tplq import _kernel_py

try:
    from tplq import _kernel as _compiled
except ImportError:
    _compiled = None


def dense_csr(rng, n_rows, n_cols):
    data = rng.dirichlet(np.ones(n_cols), size=n_rows).ravel()
    indices = np.tile(np.arange(n_cols, dtype=np.int64), n_rows)
    indptr = np.arange(0, n_rows * n_cols + 1, n_cols, dtype=np.int64)
    return indptr, indices, data


def best_of(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--rows", type=int, default=200)
    ap.add_argument("--cols", type=int, default=40)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    csr = dense_csr(np.random.default_rng(args.seed), args.rows, args.cols)
    pairs = args.rows * (args.rows - 1)
    print(f"{args.rows} rows x {args.cols} columns, {pairs} ordered pairs, alpha={args.alpha}")
    t_py, r_py = best_of(lambda: _kernel_py.pair_sup(*csr, args.alpha), args.repeat)
    print(f"python  {t_py * 1e3:10.1f} ms  value={r_py[0]:.12g} pair={r_py[1:]}")
    if _compiled is None:
        print("cython  not built")
        return
    t_cy, r_cy = best_of(lambda: _compiled.pair_sup(*csr, args.alpha), args.repeat)
    print(f"cython  {t_cy * 1e3:10.1f} ms  value={r_cy[0]:.12g} pair={r_cy[1:]}")
    print(f"speedup {t_py / t_cy:10.1f}x  |difference|={abs(r_py[0] - r_cy[0]):.2e}")


if __name__ == "__main__":
    main()
