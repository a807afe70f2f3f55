"""Benchmark the compiled TGV iteration kernel against the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--size N] [--iters K] [--repeats R]
"""

import argparse
import time

import numpy as np

from strainflow._kernels import _pykernels


def _state(h, w):
    return [
        np.zeros((2, h, w)),
        np.zeros((4, h, w)),
        np.zeros((4, h, w)),
        np.zeros((6, h, w)),
        np.zeros((4, h, w)),
        np.zeros((6, h, w)),
        np.zeros((4, h, w)),
        np.zeros((6, h, w)),
    ]


def bench(backend, A, B, c, iters, repeats):
    h, w = A.shape
    best = np.inf
    for _ in range(repeats):
        state = _state(h, w)
        t0 = time.perf_counter()
        backend.tgv_iterate(
            A, B, c, 0.2, 10.0, 0.25, 0.25, 1.0, iters, False, *state
        )
        best = min(best, time.perf_counter() - t0)
    return best, state


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=128)
    ap.add_argument("--iters", type=int, default=300)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    A = rng.standard_normal((args.size, args.size)) * 0.2
    B = rng.standard_normal((args.size, args.size)) * 0.2
    c = rng.standard_normal((args.size, args.size)) * 0.1

    t_py, state_py = bench(_pykernels, A, B, c, args.iters, args.repeats)
    print(f"python   backend: {t_py:8.3f} s  "
          f"({1e6 * t_py / (args.iters * args.size ** 2):.3f} us/pixel-iter)")

    try:
        from strainflow._kernels import _ckernels
    except ImportError:
        print("compiled backend: not built")
        return
    t_cy, state_cy = bench(_ckernels, A, B, c, args.iters, args.repeats)
    print(f"compiled backend: {t_cy:8.3f} s  "
          f"({1e6 * t_cy / (args.iters * args.size ** 2):.3f} us/pixel-iter)")
    print(f"speedup: {t_py / t_cy:.1f}x")
    diff = max(float(np.max(np.abs(p - q))) for p, q in zip(state_py, state_cy))
    print(f"max state difference: {diff:.3e}")


if __name__ == "__main__":
    main()
