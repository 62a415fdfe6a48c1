"""Order-preserving process-pool map."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1, chunksize: int = 1) -> List[R]:
    """``[fn(x) for x in items]``, optionally spread over worker processes.

    Results come back in input order, so output never depends on scheduling.
    ``fn`` must be picklable (a module-level function) when ``workers > 1``.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
