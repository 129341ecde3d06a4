# runner.py
import os
import time
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_threads() -> int:
    """Worker count from DIRAC_LAP_THREADS, 1 when unset"""
    value = os.getenv("DIRAC_LAP_THREADS", "1")
    try:
        threads = int(value)
    except ValueError:
        raise ValueError(f"DIRAC_LAP_THREADS must be an integer, got {value!r}")
    if threads < 1:
        raise ValueError(f"DIRAC_LAP_THREADS must be >= 1, got {threads}")
    return threads


def run_rows(
    func: Callable[[T], R],
    items: Iterable[T],
    threads: Optional[int] = None,
    label: str = "Run",
    progress: bool = False,
) -> list[R]:
    """
    Evaluate func on every item, in parallel when threads > 1

    Results come back in input order whatever the completion order.
    Exceptions from a row are logged and re-raised.
    """
    items = list(items)
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise ValueError(f"Thread count must be >= 1, got {threads}")

    start_time = time.time()
    logger.info(f"[{label}] Starting {len(items)} rows on {threads} thread(s)")

    def guarded(item):
        try:
            return func(item)
        except Exception as e:
            logger.error(f"[{label}] Row {item!r} failed: {str(e)}")
            raise

    bar = tqdm(total=len(items), desc=label, disable=not progress, leave=False)
    try:
        if threads == 1:
            results = []
            for item in items:
                results.append(guarded(item))
                bar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = []
                for result in pool.map(guarded, items):
                    results.append(result)
                    bar.update(1)
    finally:
        bar.close()

    duration = time.time() - start_time
    logger.info(f"[{label}] Finished {len(items)} rows in {duration:.2f}s")
    return results
