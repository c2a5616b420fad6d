"""Shared plumbing: worker-count resolution, chunked pool dispatch, progress."""

from __future__ import annotations

import multiprocessing as mp
import os
import sys
import time
from typing import Callable, Iterable, Sequence

ENV_THREADS = "CFSEMIGROUPS_THREADS"


def worker_count(requested: int | None = None) -> int:
    """Resolve a worker count: explicit argument, then the environment
    variable ``CFSEMIGROUPS_THREADS``, then the usable CPU count."""
    if requested is not None:
        if requested < 1:
            raise ValueError("worker count must be >= 1")
        return requested
    env = os.environ.get(ENV_THREADS)
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"{ENV_THREADS} must be >= 1, got {env}")
        return n
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover
        return os.cpu_count() or 1


def run_tasks(fn: Callable, tasks: Sequence, workers: int) -> list:
    """Map fn over tasks, inline when workers == 1, else via a fork pool.

    Results come back in task order either way, so callers merge
    deterministically.
    """
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    ctx = mp.get_context("fork")
    with ctx.Pool(min(workers, len(tasks))) as pool:
        return pool.map(fn, tasks)


class Progress:
    """Rate-limited progress lines on stderr.

    Library code calls ``tick(done, total, note)``; nothing is printed
    unless the instance was built with ``enabled=True``, and at most one
    line per ``interval`` seconds is emitted.
    """

    def __init__(self, enabled: bool = False, interval: float = 1.0,
                 label: str = ""):
        self.enabled = enabled
        self.interval = interval
        self.label = label
        self._last = 0.0

    def tick(self, done: float, total: float, note: str = "") -> None:
        if not self.enabled:
            return
        now = time.monotonic()
        if now - self._last < self.interval and done < total:
            return
        self._last = now
        pct = 100.0 * done / total if total else 100.0
        msg = f"{self.label}: {pct:5.1f}%"
        if note:
            msg += f" ({note})"
        print(msg, file=sys.stderr, flush=True)


def chunk_ranges(lo: int, hi: int, size: int) -> Iterable[tuple[int, int]]:
    """Split [lo, hi) into consecutive [a, b) chunks of at most ``size``."""
    if size < 1:
        raise ValueError("chunk size must be >= 1")
    a = lo
    while a < hi:
        b = min(a + size, hi)
        yield a, b
        a = b
