"""Small shared helpers: composite quadrature nodes and optional process parallelism."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

# 5-point Gauss-Legendre rule on [-1, 1]; exact through degree 9, which is more
# than the dense-output polynomials carry.
GL5_NODES, GL5_WEIGHTS = np.polynomial.legendre.leggauss(5)


def composite_gl5(f, breakpoints: np.ndarray) -> float:
    """Integrate a vectorized callable over consecutive [b_i, b_i+1] intervals."""
    b = np.asarray(breakpoints, dtype=float)
    if b.size < 2:
        return 0.0
    left, right = b[:-1], b[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    # all nodes of all intervals at once: shape (n_intervals, 5)
    ts = mid[:, None] + half[:, None] * GL5_NODES[None, :]
    vals = f(ts.ravel()).reshape(ts.shape)
    return float(np.sum(half[:, None] * GL5_WEIGHTS[None, :] * vals))


def thread_budget() -> int:
    """Worker cap from LIOUVILLE_THREADS; 1 disables pooling."""
    raw = os.environ.get("LIOUVILLE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Map preserving order; uses processes when LIOUVILLE_THREADS > 1.

    Results are gathered by input index, so the output does not depend on the
    worker count.
    """
    n = thread_budget()
    if n <= 1 or len(items) < 4:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))
