"""Thread pool for embarrassingly parallel sweeps, capped by ``FRACLAB_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "FRACLAB_THREADS"


def max_workers() -> int:
    raw = os.environ.get(ENV_THREADS, "")
    try:
        cap = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        cap = 1
    return max(1, cap)


def pmap(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``[func(x) for x in items]`` in input order, on up to ``max_workers()`` threads."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
