"""Deterministic parallel helpers.

Randomized runs are split into chunks with per-chunk generators spawned
from one seed sequence, and partial results are reduced in chunk order, so
every output is independent of the worker count.  RANK1KS_THREADS caps the
pool size.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_ENV_VAR = "RANK1KS_THREADS"


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get(_ENV_VAR)
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap is not None:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def substreams(seed: int, n: int) -> list[np.random.Generator]:
    """n independent generators deterministically derived from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def parallel_map(fn, cases, workers: int | None = None) -> list:
    """Map fn over cases on a bounded thread pool; results in input order."""
    cases = list(cases)
    n = worker_count(workers)
    if n == 1 or len(cases) <= 1:
        return [fn(c) for c in cases]
    with ThreadPoolExecutor(max_workers=min(n, len(cases))) as pool:
        return list(pool.map(fn, cases))


def chunk_sizes(total: int, chunk: int) -> list[int]:
    """Split a sample budget into fixed-size chunks (last one ragged)."""
    if total <= 0:
        raise ValueError("total must be positive")
    full, rest = divmod(total, chunk)
    return [chunk] * full + ([rest] if rest else [])
