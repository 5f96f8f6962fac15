import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("FPSO_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """Ordered map; uses threads when FPSO_THREADS > 1 (the kernel releases the GIL)."""
    items = list(items)
    n = min(thread_cap(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
