"""Bounded-window parallel mapping that preserves input order."""

from __future__ import annotations

from collections import deque
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_WINDOW_FACTOR = 4


def imap_ordered(fn: Callable[[T], R], items: Iterable[T], workers: int) -> Iterator[R]:
    """Map fn over items, yielding results in input order.

    With workers > 1 a thread pool keeps at most ``workers * 4`` tasks in
    flight, so the input can be consumed lazily without ever holding the
    whole stream in memory. A worker exception propagates to the caller
    at the position of the failed item.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    if workers == 1:
        for item in items:
            yield fn(item)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: deque[Future[R]] = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= workers * _WINDOW_FACTOR:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()
