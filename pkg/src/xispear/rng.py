"""Counter-derived random streams.

Every stochastic routine in the package draws from streams addressed by a
``(seed, *key)`` tuple. The tuple is hashed by :class:`numpy.random.SeedSequence`
(entropy = seed, spawn_key = key) and the result initialises a PCG64 bit
generator. Work is split into fixed-size blocks, each block owning one stream,
so results never depend on how blocks are scheduled across workers.

Normal variates come from numpy's ziggurat sampler; permutations from a
per-row Fisher-Yates shuffle (``Generator.permuted``).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

MAX_SEED = 2**64 - 1
BLOCK = 512
THREADS_ENV = "XISPEAR_THREADS"

# Leading stream-key component; keeps each consumer's streams disjoint.
TIE_DOMAIN = 0
PERM_DOMAIN = 1
SCENARIO_DOMAIN = 2
BIAS_DOMAIN = 3
NULL_DOMAIN = 4
SCREEN_DOMAIN = 5

T = TypeVar("T")


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for stream ``(seed, *key)``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def blocks(total: int, size: int = BLOCK) -> list[tuple[int, int]]:
    """Split ``range(total)`` into ``(start, stop)`` blocks of fixed size."""
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 1


def run_ordered(fn: Callable[[T], object], items: Sequence[T] | Iterable[T], threads: int | None = None) -> list:
    """Map ``fn`` over ``items``, returning results in input order."""
    items = list(items)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def random_permutations(gen: np.random.Generator, count: int, n: int) -> np.ndarray:
    """``count`` independent uniform permutations of 1..n as rows of an int64 array."""
    base = np.broadcast_to(np.arange(1, n + 1, dtype=np.int64), (count, n))
    return gen.permuted(base, axis=1)
