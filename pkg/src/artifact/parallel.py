"""Order-preserving parallel map used by curve builders and sweeps."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def map_ordered(fn, items, workers=1):
    """``[fn(x) for x in items]``, optionally spread over a process pool.

    Results always come back in input order, so output does not depend on
    scheduling.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
