"""Paired samples and the concomitant rank sequence both statistics consume."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import rng
from .errors import InputError, LengthMismatch, NonFiniteValue, SampleTooSmall, TiesPresent

MIN_N = 2


@dataclass(frozen=True)
class PairedSample:
    """Raw ``(x, y)`` observations. Validated on construction."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape != y.shape:
            raise LengthMismatch(f"x has {x.size} values but y has {y.size}")
        if x.size < MIN_N:
            raise SampleTooSmall(f"need at least {MIN_N} pairs, got {x.size}")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise NonFiniteValue("x and y must contain only finite values")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.x.size)

    @property
    def x_tie_groups(self) -> int:
        return tie_groups(self.x)

    @property
    def y_tie_groups(self) -> int:
        return tie_groups(self.y)

    @property
    def has_ties(self) -> bool:
        return self.x_tie_groups > 0 or self.y_tie_groups > 0


@dataclass(frozen=True)
class RankSequence:
    """A permutation of ``1..n``: the y-ranks listed in increasing-x order."""

    ranks: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.ranks)
        if not validate_permutation(r):
            raise InputError(f"not a permutation of 1..n: {self.ranks!r}")
        r = r.astype(np.int64).ravel()
        r.setflags(write=False)
        object.__setattr__(self, "ranks", r)

    @property
    def n(self) -> int:
        return int(self.ranks.size)

    def __len__(self) -> int:
        return self.n

    def tolist(self) -> list[int]:
        return [int(v) for v in self.ranks]

    def reversed_values(self) -> "RankSequence":
        """The complement ``R_i -> n + 1 - R_i``."""
        return RankSequence(self.n + 1 - self.ranks)


class TieMode(str, Enum):
    REJECT = "reject"
    RANDOM_BREAK = "random"


@dataclass(frozen=True)
class TiePolicy:
    mode: TieMode = TieMode.REJECT
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", TieMode(self.mode))
        object.__setattr__(self, "seed", rng.check_seed(self.seed))

    @classmethod
    def random_break(cls, seed: int) -> "TiePolicy":
        return cls(TieMode.RANDOM_BREAK, seed)


REJECT = TiePolicy()


def tie_groups(values: np.ndarray) -> int:
    """Number of distinct values that occur more than once."""
    _, counts = np.unique(values, return_counts=True)
    return int((counts > 1).sum())


def validate_permutation(ranks: Sequence[int] | np.ndarray) -> bool:
    """True iff ``ranks`` is exactly a permutation of ``1..n`` with ``n >= 1``."""
    try:
        arr = np.asarray(ranks)
    except (TypeError, ValueError):
        return False
    if arr.ndim != 1 or arr.size == 0:
        return False
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or not np.all(arr == np.round(arr)):
            return False
    elif arr.dtype.kind not in "iu":
        return False
    arr = arr.astype(np.int64)
    n = arr.size
    if arr.min() < 1 or arr.max() > n:
        return False
    return bool(np.bincount(arr, minlength=n + 1)[1:].min() == 1)


def _order(values: np.ndarray, gen: np.random.Generator | None) -> np.ndarray:
    # With a generator, tied values are ordered by a uniform random key.
    if gen is None:
        return np.argsort(values, kind="stable")
    return np.lexsort((gen.random(values.size), values))


def concomitant_ranks(sample: PairedSample, policy: TiePolicy = REJECT) -> RankSequence:
    """Ranks of the y-values after the pairs are sorted by ascending x.

    Under ``TieMode.RANDOM_BREAK`` ties in x and ties in y are each ordered by
    an independent seeded shuffle, so the result is a strict permutation.
    """
    if policy.mode is TieMode.REJECT:
        if sample.has_ties:
            raise TiesPresent(sample.x_tie_groups, sample.y_tie_groups)
        gx = gy = None
    else:
        gx = rng.stream(policy.seed, rng.TIE_DOMAIN, 0)
        gy = rng.stream(policy.seed, rng.TIE_DOMAIN, 1)
    order = _order(sample.x, gx)
    y_sorted = sample.y[order]
    ranks = np.empty(sample.n, dtype=np.int64)
    ranks[_order(y_sorted, gy)] = np.arange(1, sample.n + 1)
    return RankSequence(ranks)


def ranks_from_xy(x, y, policy: TiePolicy = REJECT) -> RankSequence:
    return concomitant_ranks(PairedSample(x, y), policy)


def batch_concomitant_ranks(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise concomitant ranks for ``(B, n)`` arrays of tie-free data."""
    order = np.argsort(x, axis=1, kind="stable")
    y_sorted = np.take_along_axis(y, order, axis=1)
    pos = np.argsort(y_sorted, axis=1, kind="stable")
    ranks = np.empty_like(pos)
    np.put_along_axis(ranks, pos, np.arange(1, x.shape[1] + 1)[None, :], axis=1)
    return ranks
