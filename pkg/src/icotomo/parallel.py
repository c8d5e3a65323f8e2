"""Optional process parallelism, capped by ICOTOMO_THREADS.

Unset means serial.  ``0`` means one worker per CPU.  Results are always
returned in input order so parallel runs give the same answers as serial ones.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "ICOTOMO_THREADS"


def worker_count(env: Optional[dict] = None) -> int:
    raw = (os.environ if env is None else env).get(ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be a non-negative integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{ENV_VAR} must be a non-negative integer, got {raw!r}")
    if n == 0:
        return os.cpu_count() or 1
    return n


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int) -> list[R]:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items))
