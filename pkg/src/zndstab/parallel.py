"""Deterministic parallel sweeps.

Work items fan out to a thread pool (the integration kernels release the GIL)
and results are collected in input order, so outputs are identical to a serial
run regardless of the thread count.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["default_threads", "ordered_map"]


def default_threads() -> int:
    env = os.environ.get("ZNDSTAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def ordered_map(fn, items, threads: int | None = None):
    """Map fn over items, in parallel, preserving input order in the result."""
    n = threads if threads is not None else default_threads()
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
