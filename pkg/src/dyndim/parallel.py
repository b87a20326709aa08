"""Order-preserving parallel map whose width comes from DYNDIM_THREADS."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV = "DYNDIM_THREADS"


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(ENV, "1")))
    except ValueError:
        return 1


def pmap(fn, items, threads: int | None = None) -> list:
    items = list(items)
    n = threads or thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
