"""Chatterjee's xi, Spearman's rho and the max-combined statistic.

Both rank statistics accumulate their numerators as exact int64 sums
(``sum |R[i+1] - R[i]|`` and ``sum (i - R[i])**2``) and divide once.
The squared-deviation sum stays below 2**63 for n up to about 2**20.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import SampleSizeMismatch, SampleTooSmall
from .ranks import RankSequence

SQRT_5_2 = math.sqrt(5.0 / 2.0)


class Method(str, Enum):
    SPEARMAN = "spearman"
    CHATTERJEE = "chatterjee"
    COMBINED = "combined"


@dataclass(frozen=True)
class CorrelationValue:
    value: float
    n: int

    def __float__(self) -> float:
        return self.value


def _as_ranks(ranks) -> RankSequence:
    r = ranks if isinstance(ranks, RankSequence) else RankSequence(ranks)
    if r.n < 2:
        raise SampleTooSmall(f"need n >= 2, got {r.n}")
    return r


def abs_diff_sum(ranks: np.ndarray) -> np.ndarray | int:
    """``sum_i |R[i+1] - R[i]|`` along the last axis."""
    return np.abs(np.diff(ranks, axis=-1)).sum(axis=-1)


def sq_dev_sum(ranks: np.ndarray) -> np.ndarray | int:
    """``sum_i (i - R[i])**2`` along the last axis, positions counted from 1."""
    idx = np.arange(1, ranks.shape[-1] + 1, dtype=np.int64)
    return ((idx - ranks) ** 2).sum(axis=-1)


# One correctly rounded division of two exact integers.
def xi_from_sum(total, n: int):
    d = n * n - 1
    return (d - 3 * total) / d


def spearman_from_sum(total, n: int):
    d = n * (n * n - 1)
    return (d - 6 * total) / d


def xi(ranks) -> CorrelationValue:
    """Chatterjee's correlation of a concomitant rank sequence."""
    r = _as_ranks(ranks)
    return CorrelationValue(float(xi_from_sum(int(abs_diff_sum(r.ranks)), r.n)), r.n)


def spearman(ranks) -> CorrelationValue:
    r = _as_ranks(ranks)
    return CorrelationValue(float(spearman_from_sum(int(sq_dev_sum(r.ranks)), r.n)), r.n)


def combined(s: CorrelationValue, x: CorrelationValue) -> CorrelationValue:
    """``max(|S|, sqrt(5/2) * xi)``; both inputs must share one sample size."""
    if s.n != x.n:
        raise SampleSizeMismatch(f"spearman computed at n={s.n}, xi at n={x.n}")
    return CorrelationValue(max(abs(s.value), SQRT_5_2 * x.value), s.n)


def combine_values(s, x):
    """Array version of :func:`combined` on raw values."""
    return np.maximum(np.abs(s), SQRT_5_2 * np.asarray(x))


@dataclass(frozen=True)
class Statistics:
    spearman: float
    xi: float
    combined: float
    n: int


def all_statistics(ranks) -> Statistics:
    r = _as_ranks(ranks)
    s, x = spearman(r), xi(r)
    return Statistics(s.value, x.value, combined(s, x).value, r.n)


def batch_statistics(ranks: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spearman, xi and combined for each row of a ``(B, n)`` rank matrix."""
    ranks = np.asarray(ranks, dtype=np.int64)
    n = ranks.shape[-1]
    s = spearman_from_sum(sq_dev_sum(ranks), n)
    x = xi_from_sum(abs_diff_sum(ranks), n)
    return s, x, combine_values(s, x)
