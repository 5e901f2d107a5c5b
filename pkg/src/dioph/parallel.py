"""Order-preserving process fan-out.

Work items are handed to forked workers by index; the callable and the
item list are inherited through ``fork`` rather than pickled, so closures
and certified reals built from lambdas can be used freely.  Results come
back in input order, so reductions are identical for every worker count.
"""

from __future__ import annotations

import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_WORK: tuple | None = None


def _call(i: int):
    fn, items = _WORK
    return fn(items[i])


def pmap(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    global _WORK
    items = list(items)
    if jobs <= 1 or len(items) <= 1 or "fork" not in mp.get_all_start_methods():
        return [fn(x) for x in items]
    _WORK = (fn, items)
    try:
        chunk = max(1, len(items) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs, mp_context=mp.get_context("fork")) as ex:
            return list(ex.map(_call, range(len(items)), chunksize=chunk))
    finally:
        _WORK = None
