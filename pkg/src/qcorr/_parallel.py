"""Deterministic parallel map capped by ``QCORR_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "QCORR_THREADS"


def worker_count(requested: Optional[int] = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    raw = os.environ.get(ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None


def pmap(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> list[R]:
    """``list(map(fn, items))``, optionally on a thread pool; output order is input order."""
    items = list(items)
    n = worker_count(workers)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
