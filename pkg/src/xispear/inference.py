"""P-values for the three rank tests and Benjamini-Hochberg adjustment.

Sidedness: Spearman is two-sided on ``|S|``, Chatterjee is right-tailed on
``xi``, and the combined test is right-tailed on ``max(|S|, sqrt(5/2) xi)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
from scipy import special

from . import rng
from .errors import InputError, InvalidLevel, InvalidPValue, SampleTooSmall
from .measures import SQRT_5_2, Method, abs_diff_sum, all_statistics, sq_dev_sum
from .ranks import REJECT, PairedSample, RankSequence, TiePolicy, concomitant_ranks

XI_NULL_VAR = 2.0 / 5.0


class PSource(str, Enum):
    ASYMPTOTIC = "asymptotic"
    PERMUTATION = "permutation"
    EXACT = "exact"


@dataclass(frozen=True)
class TestResult:
    method: Method
    statistic: float
    n: int
    p_value: float
    p_source: PSource
    permutations_used: int | None = None
    seed: int | None = None

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")
        if self.p_source is PSource.PERMUTATION and (self.permutations_used is None or self.seed is None):
            raise ValueError("permutation results must record permutations_used and seed")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        d["p_source"] = self.p_source.value
        return d


@dataclass(frozen=True)
class FdrResult:
    raw_p: np.ndarray
    adjusted_p: np.ndarray
    rejected: np.ndarray
    q_level: float

    @property
    def n_rejected(self) -> int:
        return int(self.rejected.sum())


def normal_cdf(z):
    """Standard normal distribution function.

    Evaluated through the complementary error function (Cephes ``ndtr``),
    accurate to a few ulps across the real line, including the far tails.
    """
    out = special.ndtr(z)
    return float(out) if np.ndim(out) == 0 else out


def normal_sf(z):
    """``1 - normal_cdf(z)`` without cancellation for large ``z``."""
    return normal_cdf(-np.asarray(z, dtype=float))


def _check_n(n: int) -> None:
    if n < 2:
        raise SampleTooSmall(f"need n >= 2, got {n}")


def spearman_pvalue_asymptotic(s, n: int):
    """Two-sided ``2 (1 - Phi(sqrt(n) |s|))``."""
    _check_n(n)
    p = np.minimum(1.0, 2.0 * normal_sf(math.sqrt(n) * np.abs(s)))
    return float(p) if np.ndim(p) == 0 else p


def xi_pvalue_asymptotic(x, n: int):
    """Right tail of ``sqrt(n) xi ~ N(0, 2/5)``."""
    _check_n(n)
    p = normal_sf(math.sqrt(n) * np.asarray(x, dtype=float) / math.sqrt(XI_NULL_VAR))
    return float(p) if np.ndim(p) == 0 else p


def combined_pvalue_asymptotic(i, n: int):
    """``1 - Phi(z) [1 - 2 Phi(-z)]`` with ``z = sqrt(n) max(I, 0)``.

    Rewritten as ``Phi(-z) (1 + 2 Phi(z))`` so the tail keeps full
    relative precision.
    """
    _check_n(n)
    z = math.sqrt(n) * np.maximum(np.asarray(i, dtype=float), 0.0)
    lo = normal_cdf(-z)
    p = np.minimum(1.0, lo * (1.0 + 2.0 * (1.0 - lo)))
    return float(p) if np.ndim(p) == 0 else p


def pvalue_asymptotic(method: Method | str, statistic, n: int):
    method = Method(method)
    if method is Method.SPEARMAN:
        return spearman_pvalue_asymptotic(statistic, n)
    if method is Method.CHATTERJEE:
        return xi_pvalue_asymptotic(statistic, n)
    return combined_pvalue_asymptotic(statistic, n)


def statistic_for(method: Method | str, s: float, x: float, i: float) -> float:
    """The test statistic reported for ``method`` (``|S|`` for Spearman)."""
    method = Method(method)
    return {Method.SPEARMAN: abs(s), Method.CHATTERJEE: x, Method.COMBINED: i}[method]


def asymptotic_test(ranks: RankSequence, method: Method | str) -> TestResult:
    method = Method(method)
    st = all_statistics(ranks)
    stat = {Method.SPEARMAN: st.spearman, Method.CHATTERJEE: st.xi, Method.COMBINED: st.combined}[method]
    return TestResult(method, stat, st.n, pvalue_asymptotic(method, stat, st.n), PSource.ASYMPTOTIC)


# -- permutation engine -------------------------------------------------------

# Above this n the squared integer keys of the combined statistic overflow int64.
_EXACT_KEY_MAX_N = 1100


def _keys(ranks: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integer-scaled ``|S|``, ``xi`` and squared combined statistic per row.

    With ``N = n (n^2 - 1)``: ``S N = N - 6 B`` and ``xi N = n (n^2 - 1 - 3 A)``.
    Orderings of the keys equal orderings of the statistics exactly.
    """
    n = ranks.shape[-1]
    big = n * (n * n - 1)
    s_key = big - 6 * sq_dev_sum(ranks)
    x_key = n * (n * n - 1 - 3 * abs_diff_sum(ranks))
    if n <= _EXACT_KEY_MAX_N:
        c_key = np.maximum(2 * s_key * s_key, np.where(x_key > 0, 5 * x_key * x_key, 0))
    else:
        c_key = np.maximum(np.abs(s_key), SQRT_5_2 * x_key).astype(float)
    return np.abs(s_key), x_key, c_key


@dataclass(frozen=True)
class PermutationCounts:
    """Exceedance counts ``#{b : T_b >= T_0}`` for every method at once."""

    permutations: int
    seed: int
    counts: dict = field(default_factory=dict)

    def pvalue(self, method: Method | str) -> float:
        return (1 + self.counts[Method(method)]) / (self.permutations + 1)


def permutation_counts(
    ranks: RankSequence | np.ndarray,
    permutations: int,
    seed: int,
    *,
    key: tuple[int, ...] = (),
    threads: int | None = None,
) -> PermutationCounts:
    """Count permuted statistics at least as extreme as the observed ones.

    Permutation block ``b`` is drawn from stream ``(seed, PERM_DOMAIN, *key, b)``;
    counts are exact integers summed in block order, so the result does not
    depend on ``threads``.
    """
    if permutations < 1:
        raise InputError(f"need at least one permutation, got {permutations}")
    obs = np.asarray(ranks.ranks if isinstance(ranks, RankSequence) else ranks, dtype=np.int64)
    n = obs.size
    o_s, o_x, o_c = (k[()] for k in _keys(obs))

    def work(block: tuple[int, int, int]) -> np.ndarray:
        b, lo, hi = block
        gen = rng.stream(seed, rng.PERM_DOMAIN, *key, b)
        ks, kx, kc = _keys(rng.random_permutations(gen, hi - lo, n))
        return np.array([(ks >= o_s).sum(), (kx >= o_x).sum(), (kc >= o_c).sum()], dtype=np.int64)

    jobs = [(b, lo, hi) for b, (lo, hi) in enumerate(rng.blocks(permutations))]
    total = np.sum(rng.run_ordered(work, jobs, threads), axis=0)
    counts = {Method.SPEARMAN: int(total[0]), Method.CHATTERJEE: int(total[1]), Method.COMBINED: int(total[2])}
    return PermutationCounts(permutations, seed, counts)


def permutation_pvalue(
    sample: PairedSample | RankSequence,
    method: Method | str,
    permutations: int,
    seed: int,
    policy: TiePolicy = REJECT,
    threads: int | None = None,
) -> TestResult:
    """Monte Carlo permutation test, ``p = (1 + #{T_b >= T_0}) / (R + 1)``.

    The y-ranks are permuted directly, which under no ties is the same as
    permuting y.
    """
    method = Method(method)
    rng.check_seed(seed)
    ranks = sample if isinstance(sample, RankSequence) else concomitant_ranks(sample, policy)
    st = all_statistics(ranks)
    pc = permutation_counts(ranks, permutations, seed, threads=threads)
    return TestResult(
        method,
        statistic_for(method, st.spearman, st.xi, st.combined),
        st.n,
        pc.pvalue(method),
        PSource.PERMUTATION,
        permutations,
        seed,
    )


# -- multiple testing ---------------------------------------------------------


def bh_adjust(pvalues, q: float = 0.05) -> FdrResult:
    """Benjamini-Hochberg step-up adjustment.

    ``adjusted[(i)] = min_{j >= i} m p[(j)] / j``, clipped at 1, and a
    hypothesis is rejected when its adjusted p-value is at most ``q``.
    """
    p = np.asarray(pvalues, dtype=float).ravel()
    if not 0.0 < q < 1.0:
        raise InvalidLevel(f"q must lie in (0, 1), got {q}")
    if p.size and (not np.isfinite(p).all() or p.min() < 0.0 or p.max() > 1.0):
        raise InvalidPValue("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    stepped = np.minimum.accumulate(scaled[::-1])[::-1]
    adjusted = np.empty(m)
    adjusted[order] = np.minimum(stepped, 1.0)
    return FdrResult(p, adjusted, adjusted <= q, q)
