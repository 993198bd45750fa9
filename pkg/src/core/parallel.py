"""Worker-count resolution and an order-preserving parallel map."""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)

THREADS_ENV = "DEGMA_THREADS"


def resolve_workers(requested: Optional[int] = None) -> int:
    """DEGMA_THREADS wins over the requested count; default is the core count."""
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            value = 0
        if value >= 1:
            return value
        logger.warning("Ignoring %s=%r: expected a positive integer", THREADS_ENV, env)
    if requested is not None and requested >= 1:
        return int(requested)
    return os.cpu_count() or 1


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Map func over items, results in input order regardless of worker count."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
