"""Thread pool sizing and an order-preserving parallel map."""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

from typeguard import typechecked

logger = logging.getLogger(__name__)

THREADS_ENV = "POLYGREEN_THREADS"

T = TypeVar("T")
R = TypeVar("R")


@typechecked
def worker_count() -> int:
    """Returns the worker cap from POLYGREEN_THREADS, default cpu count."""
    raw = os.environ.get(THREADS_ENV, "")
    default = os.cpu_count() or 1
    if not raw:
        return default
    try:
        count = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%s.", THREADS_ENV, raw)
        return default
    return max(1, count)


def parallel_map(func: Callable[[T], R], items: Sequence[T]) -> List[R]:
    """Applies func to every item, keeping the input order."""
    workers = min(worker_count(), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
