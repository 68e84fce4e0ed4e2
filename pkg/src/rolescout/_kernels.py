"""Hot numeric kernels: numba-compiled fast path, interpreted fallback.

Each kernel is written once as plain loops over numpy arrays. When numba is
importable and ROLESCOUT_NUMBA is not set to 0/false/off, the same function
objects are JIT-compiled; otherwise they run through the interpreter. Loop
order and libm calls are shared, so both paths yield bit-identical results
(checked in tests, timed in benchmarks/bench_kernels.py).
"""

from __future__ import annotations

import math
import os

import numpy as np

PROB_EPS = 1e-12


def _numba_requested() -> bool:
    return os.environ.get("ROLESCOUT_NUMBA", "1").strip().lower() not in {"0", "false", "off"}


NUMBA_ENABLED = False
if _numba_requested():
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False


def _maybe_jit(fn):
    if NUMBA_ENABLED:
        return _njit(cache=True)(fn)
    return fn


def _sgd_epochs(X, y, cw, order, alpha, eta0, tol, max_epochs):
    """Per-sample SGD on the L2-regularized weighted logistic objective.

    order holds one row of sample indices per epoch (the shuffles are drawn
    outside so the kernel itself is deterministic). The bias is not
    regularized. Returns (weights, bias, epoch objectives, epochs run);
    stops early once the epoch objective improves by less than tol.
    """
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    losses = np.zeros(max_epochs)
    t = 0
    prev = math.inf
    epochs_run = 0
    for e in range(max_epochs):
        for k in range(n):
            i = order[e, k]
            z = b
            for j in range(d):
                z += X[i, j] * w[j]
            p = 1.0 / (1.0 + math.exp(-z))
            g = cw[i] * (p - y[i])
            eta = eta0 / (1.0 + eta0 * alpha * t)
            for j in range(d):
                w[j] -= eta * (g * X[i, j] + alpha * w[j])
            b -= eta * g
            t += 1
        s = 0.0
        for i in range(n):
            z = b
            for j in range(d):
                z += X[i, j] * w[j]
            p = 1.0 / (1.0 + math.exp(-z))
            if p < PROB_EPS:
                p = PROB_EPS
            elif p > 1.0 - PROB_EPS:
                p = 1.0 - PROB_EPS
            s += cw[i] * -(y[i] * math.log(p) + (1.0 - y[i]) * math.log(1.0 - p))
        wsq = 0.0
        for j in range(d):
            wsq += w[j] * w[j]
        obj = s / n + 0.5 * alpha * wsq
        losses[e] = obj
        epochs_run = e + 1
        if prev - obj < tol:
            break
        prev = obj
    return w, b, losses, epochs_run


def _weighted_loss(X, y, cw, w, b):
    """Mean of per-example weighted logistic losses (probabilities clamped)."""
    n, d = X.shape
    s = 0.0
    for i in range(n):
        z = b
        for j in range(d):
            z += X[i, j] * w[j]
        p = 1.0 / (1.0 + math.exp(-z))
        if p < PROB_EPS:
            p = PROB_EPS
        elif p > 1.0 - PROB_EPS:
            p = 1.0 - PROB_EPS
        s += cw[i] * -(y[i] * math.log(p) + (1.0 - y[i]) * math.log(1.0 - p))
    return s / n


def _predict_matrix(X, w, b):
    """Row-wise sigmoid(w.x + b), clamped into the open unit interval."""
    n, d = X.shape
    out = np.empty(n)
    for i in range(n):
        z = b
        for j in range(d):
            z += X[i, j] * w[j]
        p = 1.0 / (1.0 + math.exp(-z))
        if p < PROB_EPS:
            p = PROB_EPS
        elif p > 1.0 - PROB_EPS:
            p = 1.0 - PROB_EPS
        out[i] = p
    return out


def _distance_transform_matrix(X, lower, upper):
    """Per-cell distance to the column's optimal range; 0 inside it."""
    n, d = X.shape
    out = np.empty((n, d))
    for i in range(n):
        for j in range(d):
            v = X[i, j]
            gap = lower[j] - v
            over = v - upper[j]
            dist = gap if gap > over else over
            out[i, j] = dist if dist > 0.0 else 0.0
    return out


def _knn_indices(X, k):
    """Brute-force k nearest neighbors (Euclidean, self excluded).

    Ties break toward the lower row index so the result is deterministic.
    """
    n, d = X.shape
    out = np.empty((n, k), dtype=np.int64)
    dist = np.empty(n)
    for i in range(n):
        for j in range(n):
            s = 0.0
            for m in range(d):
                diff = X[i, m] - X[j, m]
                s += diff * diff
            dist[j] = s
        dist[i] = math.inf
        for c in range(k):
            best = -1
            best_d = math.inf
            for j in range(n):
                if dist[j] < best_d:
                    best_d = dist[j]
                    best = j
            out[i, c] = best
            dist[best] = math.inf
    return out


# Interpreted implementations, kept importable for cross-backend tests and
# the benchmark regardless of the active backend.
PY_IMPLS = {
    "sgd_epochs": _sgd_epochs,
    "weighted_loss": _weighted_loss,
    "predict_matrix": _predict_matrix,
    "distance_transform_matrix": _distance_transform_matrix,
    "knn_indices": _knn_indices,
}

sgd_epochs = _maybe_jit(_sgd_epochs)
weighted_loss = _maybe_jit(_weighted_loss)
predict_matrix = _maybe_jit(_predict_matrix)
distance_transform_matrix = _maybe_jit(_distance_transform_matrix)
knn_indices = _maybe_jit(_knn_indices)

JIT_IMPLS = {
    "sgd_epochs": sgd_epochs,
    "weighted_loss": weighted_loss,
    "predict_matrix": predict_matrix,
    "distance_transform_matrix": distance_transform_matrix,
    "knn_indices": knn_indices,
}


def backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
