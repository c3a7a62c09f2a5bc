"""Order-preserving map over independent work items, optionally threaded."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Thread cap from the PCONVEX_THREADS environment variable (default 1)."""
    try:
        return max(1, int(os.environ.get("PCONVEX_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items, workers: int | None = None) -> list:
    """``[fn(x) for x in items]``, possibly evaluated on a thread pool; result order is input order."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
