"""Process-pool map with an inline single-worker fast path.

Worker count comes from the QUANTCURE_THREADS environment variable when
set, otherwise the available parallelism.  With one worker the map runs
inline in the calling process, so callables need not be picklable there.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

__all__ = ["ENV_THREADS", "worker_count", "parallel_map"]

ENV_THREADS = "QUANTCURE_THREADS"


def worker_count():
    raw = os.environ.get(ENV_THREADS)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 0
        if n >= 1:
            return n
    return os.cpu_count() or 1


def parallel_map(func, items, workers=None):
    """Apply ``func`` over ``items`` preserving order."""
    items = list(items)
    if workers is None:
        workers = worker_count()
    workers = max(1, min(int(workers), len(items) or 1))
    if workers == 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
