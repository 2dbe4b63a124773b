"""Ordered chunk mapping with an optional thread pool.

All heavy loops in this package are chunked scans whose per-chunk results
are combined in a fixed order, so running them on a pool changes wall time
but never the result.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

_C = TypeVar("_C")
_R = TypeVar("_R")


def chunked_map(fn: Callable[[_C], _R], chunks: Sequence[_C], threads: int) -> list:
    """Apply fn to every chunk, preserving chunk order in the result."""
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))
