"""
Order-preserving parallel map for independent rows and samples.

Workers receive the parent's settings, so results do not depend on the
scheduler or on how the child processes were started.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from config.settings import Settings, get_settings, use_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def _install(settings_data: dict) -> None:
    use_settings(Settings(**settings_data))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], jobs: Optional[int] = None) -> list[R]:
    """fn over items, results in input order; jobs <= 1 runs inline."""
    work = list(items)
    workers = min(jobs or get_settings().jobs, len(work))
    if workers <= 1:
        return [fn(item) for item in work]
    logger.info(f"→ {len(work)} tasks on {workers} processes")
    try:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_install, initargs=(get_settings().model_dump(),)
        ) as pool:
            return list(pool.map(fn, work))
    except Exception as e:
        if isinstance(e, (ValueError, RuntimeError, LookupError, AssertionError)):
            raise
        raise RuntimeError(f"Failed to run {len(work)} tasks in parallel: {e}") from e
