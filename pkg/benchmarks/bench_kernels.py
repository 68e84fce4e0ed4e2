"""Benchmark the numba-compiled kernels against the interpreted fallback.

Runs each kernel on pipeline-scale inputs through both paths, checks the
outputs agree exactly, and prints a timing table. The JIT path is warmed
once before timing so compilation is not measured.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rolescout import _kernels


def _time(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if not _kernels.NUMBA_ENABLED:
        raise SystemExit(
            "numba backend is disabled (ROLESCOUT_NUMBA=0 or numba missing); "
            "nothing to compare"
        )

    rng = np.random.default_rng(42)
    n, d, epochs = 400, 24, 100
    X = rng.uniform(0.0, 4.0, (n, d))
    y = (rng.random(n) < 0.5).astype(np.float64)
    cw = np.where(y == 1.0, 1.0, 1.0)
    order = np.stack([rng.permutation(n) for _ in range(epochs)]).astype(np.int64)
    w = rng.normal(0, 0.3, d)
    lower = np.quantile(X, 0.25, axis=0)
    upper = np.quantile(X, 0.75, axis=0)
    big = rng.uniform(-2.0, 2.0, (2000, d))

    cases = {
        "sgd_epochs": (X, y, cw, order, 0.05, 0.5, 0.0, epochs),
        "weighted_loss": (big, rng.integers(0, 2, 2000).astype(np.float64),
                          np.ones(2000), w, 0.1),
        "predict_matrix": (big, w, 0.1),
        "distance_transform_matrix": (big, lower - 2.0, upper - 2.0),
        "knn_indices": (rng.uniform(0, 4, (300, d)), 5),
    }

    print(f"{'kernel':<28} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name, case in cases.items():
        jit = _kernels.JIT_IMPLS[name]
        py = _kernels.PY_IMPLS[name]
        jit(*case)  # warm the JIT cache
        res_jit = jit(*case)
        res_py = py(*case)
        jit_out = res_jit if isinstance(res_jit, tuple) else (res_jit,)
        py_out = res_py if isinstance(res_py, tuple) else (res_py,)
        for a, b in zip(jit_out, py_out):
            assert np.array_equal(np.asarray(a), np.asarray(b)), f"{name}: backends disagree"
        t_jit = _time(jit, case, args.repeat)
        t_py = _time(py, case, args.repeat)
        print(f"{name:<28} {t_jit * 1e3:>9.2f} ms {t_py * 1e3:>9.2f} ms {t_py / t_jit:>8.0f}x")
    print("\nall kernels bit-identical across backends")


if __name__ == "__main__":
    main()
