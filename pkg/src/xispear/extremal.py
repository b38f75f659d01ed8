"""Rank sequences on which xi and |Spearman| disagree as much as possible.

``case1`` is a V shape: the odd ranks descend, then the even ranks ascend.
Its xi tends to 1 while |S| = 3/(2n) tends to 0.

``case2`` interleaves ``1..m`` with ``m+1..2m`` and appends ``p`` ranks in
order. It is globally increasing but wiggles locally, so |S| stays large
while xi is small.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import EvenN, InvalidShape, SampleTooSmall
from .exact import exact_spearman, exact_xi
from .measures import spearman, xi
from .ranks import RankSequence


class Case(str, Enum):
    CASE1 = "1"
    CASE2 = "2"


@dataclass(frozen=True)
class ExtremalSpec:
    case: Case
    n: int
    m: int | None = None
    p: int | None = None

    @classmethod
    def case1(cls, n: int) -> "ExtremalSpec":
        _check_case1(n)
        return cls(Case.CASE1, n)

    @classmethod
    def case2(cls, m: int, p: int) -> "ExtremalSpec":
        _check_case2(m, p)
        return cls(Case.CASE2, 2 * m + p, m, p)

    def ranks(self) -> RankSequence:
        if self.case is Case.CASE1:
            return case1_ranks(self.n)
        return case2_ranks(self.m, self.p)


@dataclass(frozen=True)
class ExtremalValues:
    xi: float
    abs_s: float


def _check_case1(n: int) -> None:
    if n < 3:
        raise SampleTooSmall(f"case 1 needs odd n >= 3, got {n}")
    if n % 2 == 0:
        raise EvenN(f"case 1 needs odd n, got {n}")


def _check_case2(m: int, p: int) -> None:
    if m < 2 or p < 0:
        raise InvalidShape(f"case 2 needs m >= 2 and p >= 0, got m={m}, p={p}")


def case1_list(n: int) -> list[int]:
    _check_case1(n)
    half = (n + 1) // 2
    return [n - 2 * (i - 1) if i <= half else 2 * i - (n + 1) for i in range(1, n + 1)]


def case1_ranks(n: int) -> RankSequence:
    return RankSequence(case1_list(n))


def case1_exact(n: int) -> tuple[Fraction, Fraction]:
    """Closed forms ``(1 - (6n - 9)/(n^2 - 1), 3/(2n))`` as rationals."""
    _check_case1(n)
    return 1 - Fraction(6 * n - 9, n * n - 1), Fraction(3, 2 * n)


def case1_closed_forms(n: int) -> ExtremalValues:
    x, s = case1_exact(n)
    return ExtremalValues(float(x), float(s))


def case2_list(m: int, p: int) -> list[int]:
    _check_case2(m, p)
    out = []
    for i in range(1, 2 * m + p + 1):
        if i > 2 * m:
            out.append(i)
        elif i % 2:
            out.append((i + 1) // 2)
        else:
            out.append(i // 2 + m)
    return out


def case2_ranks(m: int, p: int) -> RankSequence:
    return RankSequence(case2_list(m, p))


def case2_xi_exact(m: int, p: int) -> Fraction:
    _check_case2(m, p)
    n = 2 * m + p
    return 1 - Fraction(3 * (m * m + (m - 1) ** 2 + p), n * n - 1)


def case2_sq_dev(m: int) -> int:
    """``sum (i - R_i)^2`` of the case 2 construction, which is ``(m-1) m (2m-1) / 3``."""
    return (m - 1) * m * (2 * m - 1) // 3


def case2_evaluate(m: int, p: int) -> ExtremalValues:
    """xi from its closed form; |S| evaluated directly on the constructed ranks."""
    return ExtremalValues(float(case2_xi_exact(m, p)), abs(spearman(case2_ranks(m, p)).value))


def case2_limits(c: float) -> ExtremalValues:
    """Large-m limits for fixed ``c = p / m``."""
    return ExtremalValues(1 - 6 / (c + 2) ** 2, 1 - 4 / (c + 2) ** 3)


def describe(spec: ExtremalSpec) -> dict:
    """Ranks plus direct and closed-form statistics, JSON-ready."""
    r = spec.ranks()
    rl = r.tolist()
    out = {
        "case": int(spec.case.value),
        "n": spec.n,
        "ranks": rl,
        "xi": xi(r).value,
        "abs_s": abs(spearman(r).value),
        "xi_exact": str(exact_xi(rl)),
        "abs_s_exact": str(abs(exact_spearman(rl))),
    }
    if spec.case is Case.CASE1:
        cx, cs = case1_exact(spec.n)
        out["closed_form"] = {"xi": float(cx), "abs_s": float(cs), "xi_exact": str(cx), "abs_s_exact": str(cs)}
    else:
        cx = case2_xi_exact(spec.m, spec.p)
        out["m"], out["p"] = spec.m, spec.p
        out["closed_form"] = {"xi": float(cx), "xi_exact": str(cx)}
    return out
