"""Ordered process-pool map used for per-realization work."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def resolve_workers(workers: int | None) -> int:
    if workers is None or workers <= 0:
        return os.cpu_count() or 1
    return int(workers)


def ordered_map(fn, items, workers: int | None = 1) -> list:
    """``[fn(x) for x in items]``, possibly computed in worker processes.

    Results always come back in input order, so any reduction done by the
    caller is independent of the number of workers.
    """
    items = list(items)
    n = resolve_workers(workers)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * n))
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
