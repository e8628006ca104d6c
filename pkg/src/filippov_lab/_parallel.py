from __future__ import annotations

import os

ENV_THREADS = "FILIPPOV_LAB_THREADS"


def worker_count(n_tasks: int) -> int:
    """Pool size: at most ``n_tasks``, capped by FILIPPOV_LAB_THREADS when set."""
    cap = os.cpu_count() or 1
    raw = os.environ.get(ENV_THREADS)
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            pass
    return max(1, min(cap, n_tasks))
