"""Small statistics helpers shared by the Monte-Carlo modules."""
from __future__ import annotations

import numpy as np


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def mean_stderr(samples) -> tuple[float, float]:
    s = np.asarray(samples, dtype=float)
    if s.size < 2:
        return float(s.mean()), float("nan")
    return float(s.mean()), float(s.std(ddof=1) / np.sqrt(s.size))


def binomial_stderr(p, n: int):
    p = np.asarray(p, dtype=float)
    return np.sqrt(np.clip(p * (1.0 - p), 0.0, None) / n)


def chunk_ranges(total: int, chunks: int) -> list[tuple[int, int]]:
    """Split ``range(total)`` into at most ``chunks`` contiguous pieces, in order."""
    chunks = max(1, min(chunks, total)) if total else 1
    edges = np.linspace(0, total, chunks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_chunks(fn, total: int, threads: int = 1):
    """Apply ``fn(start, stop)`` over index chunks; results returned in index order.

    The kernels release the GIL, so a thread pool gives real parallelism.
    """
    ranges = chunk_ranges(total, threads)
    if threads <= 1 or len(ranges) == 1:
        return [fn(a, b) for a, b in ranges]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda r: fn(*r), ranges))
