"""Worker pool sized by the ``GBIAS_THREADS`` environment variable."""
import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    raw = os.environ.get("GBIAS_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


def ordered_map(fn, items):
    """``list(map(fn, items))``, spread over threads; output order is kept."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
