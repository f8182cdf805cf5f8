"""Order-preserving parallel map over grid points."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_threads = 1


def default_threads() -> int:
    env = os.environ.get("TENTLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def set_threads(n: int | None) -> int:
    """Set the worker count used by :func:`pmap` (``None`` picks the default); returns it."""
    global _threads
    _threads = default_threads() if n is None else max(1, int(n))
    return _threads


def get_threads() -> int:
    return _threads


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``[fn(x) for x in items]``, run on a thread pool when more than one worker is configured.

    Results come back in input order, so reductions over them do not depend
    on the worker count.
    """
    items = list(items)
    if _threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=_threads) as ex:
        return list(ex.map(fn, items))
