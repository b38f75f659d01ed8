"""Exact null laws of (Spearman, xi) by enumerating every permutation.

All arithmetic is over :class:`fractions.Fraction`, so moments and
covariances come out as exact rationals. Enumeration is capped at n = 8
(40320 permutations).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import InputError, NTooLarge, NTooSmallForMoment, SampleTooSmall
from .measures import Method
from .ranks import validate_permutation

MAX_N = 8
ZERO = Fraction(0)


class CovarianceMode(str, Enum):
    S_XI = "S_xi"
    ABS_S_XI = "AbsS_xi"


class RankMoment(str, Enum):
    COV_R1_R2 = "CovR1R2"
    VAR_R1 = "VarR1"
    COV_R1_MIN_R1R2 = "CovR1MinR1R2"
    COV_R1_MIN_R2R3 = "CovR1MinR2R3"
    MEAN_SQRTN_S = "MeanSqrtnS"
    VAR_SQRTN_S = "VarSqrtnS"


def exact_xi(ranks: Sequence[int]) -> Fraction:
    """``1 - 3A/(n^2 - 1)`` with ``A = sum |R[i+1] - R[i]|``, as a rational."""
    n = len(ranks)
    a = sum(abs(ranks[i + 1] - ranks[i]) for i in range(n - 1))
    return 1 - Fraction(3 * a, n * n - 1)


def exact_spearman(ranks: Sequence[int]) -> Fraction:
    n = len(ranks)
    b = sum((i - r) ** 2 for i, r in enumerate(ranks, start=1))
    return 1 - Fraction(6 * b, n * (n * n - 1))


def exact_combined_squared(s: Fraction, x: Fraction) -> Fraction:
    """Square of ``max(|S|, sqrt(5/2) xi)``.

    The combined value is never negative, so ordering by its square is
    exact ordering by the value itself, with no irrational arithmetic.
    """
    return max(s * s, Fraction(5, 2) * x * x if x > 0 else ZERO)


@dataclass(frozen=True)
class Atom:
    ranks: tuple[int, ...]
    spearman: Fraction
    xi: Fraction
    multiplicity: int = 1


@dataclass(frozen=True)
class ExactDistribution:
    """One atom per permutation, listed in lexicographic order."""

    n: int
    atoms: tuple[Atom, ...]

    @property
    def total(self) -> int:
        return sum(a.multiplicity for a in self.atoms)

    def law(self) -> Counter:
        """Collapsed joint law: ``(spearman, xi) -> multiplicity``."""
        out: Counter = Counter()
        for a in self.atoms:
            out[(a.spearman, a.xi)] += a.multiplicity
        return out

    def expectation(self, f) -> Fraction:
        return sum((f(a) * a.multiplicity for a in self.atoms), ZERO) / self.total

    def covariance(self, f, g) -> Fraction:
        ef, eg = self.expectation(f), self.expectation(g)
        return self.expectation(lambda a: f(a) * g(a)) - ef * eg


def _check_n(n: int) -> int:
    n = int(n)
    if n > MAX_N:
        raise NTooLarge(f"exact enumeration is limited to n <= {MAX_N}, got {n}")
    if n < 2:
        raise SampleTooSmall(f"need n >= 2, got {n}")
    return n


@lru_cache(maxsize=None)
def enumerate_null(n: int) -> ExactDistribution:
    n = _check_n(n)
    atoms = tuple(
        Atom(p, exact_spearman(p), exact_xi(p))
        for p in itertools.permutations(range(1, n + 1))
    )
    return ExactDistribution(n, atoms)


def exact_covariance(n: int, mode: CovarianceMode | str = CovarianceMode.S_XI) -> Fraction:
    dist = enumerate_null(n)
    mode = CovarianceMode(mode)
    if mode is CovarianceMode.S_XI:
        return dist.covariance(lambda a: a.spearman, lambda a: a.xi)
    return dist.covariance(lambda a: abs(a.spearman), lambda a: a.xi)


def rank_moment_formula(n: int, which: RankMoment | str) -> Fraction:
    """Closed-form value of each rank moment under a uniform permutation."""
    which = RankMoment(which)
    return {
        RankMoment.COV_R1_R2: Fraction(-(n + 1), 12),
        RankMoment.VAR_R1: Fraction((n - 1) * (n + 1), 12),
        RankMoment.COV_R1_MIN_R1R2: Fraction((n + 1) * (n - 2), 24),
        RankMoment.COV_R1_MIN_R2R3: Fraction(-(n + 1), 12),
        RankMoment.MEAN_SQRTN_S: ZERO,
        RankMoment.VAR_SQRTN_S: Fraction(n, n - 1),
    }[which]


def _perm_cov(perms: list[tuple[int, ...]], f, g) -> Fraction:
    m = len(perms)
    sf = sum(f(p) for p in perms)
    sg = sum(g(p) for p in perms)
    sfg = sum(f(p) * g(p) for p in perms)
    return Fraction(sfg, m) - Fraction(sf, m) * Fraction(sg, m)


def exact_rank_moment(n: int, which: RankMoment | str) -> Fraction:
    """Moment of the rank vector computed by brute-force enumeration."""
    n = _check_n(n)
    which = RankMoment(which)
    if which is RankMoment.COV_R1_MIN_R2R3 and n < 3:
        raise NTooSmallForMoment(f"{which.value} involves three ranks; need n >= 3")
    if which in (RankMoment.MEAN_SQRTN_S, RankMoment.VAR_SQRTN_S):
        dist = enumerate_null(n)
        if which is RankMoment.VAR_SQRTN_S:
            return n * dist.covariance(lambda a: a.spearman, lambda a: a.spearman)
        mean = dist.expectation(lambda a: a.spearman)
        if mean != 0:
            # sqrt(n) * mean would be irrational
            raise ArithmeticError(f"E[S] = {mean} is nonzero; sqrt(n) E[S] is not rational")
        return ZERO
    perms = list(itertools.permutations(range(1, n + 1)))
    if which is RankMoment.COV_R1_R2:
        return _perm_cov(perms, lambda p: p[0], lambda p: p[1])
    if which is RankMoment.VAR_R1:
        return _perm_cov(perms, lambda p: p[0], lambda p: p[0])
    if which is RankMoment.COV_R1_MIN_R1R2:
        return _perm_cov(perms, lambda p: p[0], lambda p: min(p[0], p[1]))
    return _perm_cov(perms, lambda p: p[0], lambda p: min(p[1], p[2]))


def _tail_key(method: Method):
    if method is Method.SPEARMAN:
        return lambda s, x: abs(s)
    if method is Method.CHATTERJEE:
        return lambda s, x: x
    return exact_combined_squared


def exact_pvalue(n: int, method: Method | str, observed: Fraction | int | float) -> Fraction:
    """``P(T >= observed)`` under the uniform permutation law.

    ``T`` is ``|S|`` for Spearman, ``xi`` for Chatterjee and the combined
    value ``max(|S|, sqrt(5/2) xi)`` for the combined test.
    """
    dist = enumerate_null(n)
    method = Method(method)
    obs = Fraction(observed)
    if method is Method.COMBINED:
        if obs <= 0:
            return Fraction(1)
        obs = obs * obs
    key = _tail_key(method)
    hits = sum(a.multiplicity for a in dist.atoms if key(a.spearman, a.xi) >= obs)
    return Fraction(hits, dist.total)


def exact_pvalue_for_ranks(ranks: Sequence[int], method: Method | str) -> Fraction:
    """Exact permutation p-value of an observed rank sequence (n <= 8)."""
    ranks = tuple(int(r) for r in ranks)
    if not validate_permutation(ranks):
        raise InputError(f"not a permutation of 1..n: {ranks}")
    dist = enumerate_null(len(ranks))
    method = Method(method)
    key = _tail_key(method)
    obs = key(exact_spearman(ranks), exact_xi(ranks))
    hits = sum(a.multiplicity for a in dist.atoms if key(a.spearman, a.xi) >= obs)
    return Fraction(hits, dist.total)


def table1_rows() -> list[tuple[tuple[int, ...], Fraction, Fraction]]:
    """``(ranks, xi, S)`` for every permutation of three ranks."""
    return [(a.ranks, a.xi, a.spearman) for a in enumerate_null(3).atoms]


def extremal_search(n: int, eps: Fraction | float) -> tuple[Fraction, list[tuple[int, ...]]]:
    """Largest ``|S|`` over permutations with ``xi < eps``, by brute force.

    Returns the maximum and every permutation attaining it. Raises
    ``InputError`` when no permutation satisfies the constraint.
    """
    dist = enumerate_null(n)
    eps = Fraction(eps)
    feasible: Iterable[Atom] = [a for a in dist.atoms if a.xi < eps]
    if not feasible:
        raise InputError(f"no permutation of size {n} has xi < {eps}")
    best = max(abs(a.spearman) for a in feasible)
    return best, [a.ranks for a in feasible if abs(a.spearman) == best]
