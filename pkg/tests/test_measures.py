import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xispear.errors import SampleSizeMismatch, SampleTooSmall
from xispear.measures import (
    SQRT_5_2,
    CorrelationValue,
    batch_statistics,
    combined,
    spearman,
    xi,
)
from xispear.ranks import RankSequence


def perms(min_n=2, max_n=30):
    return st.integers(min_n, max_n).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


class TestXi:
    @pytest.mark.parametrize(
        "ranks, expected",
        [
            ((1, 2, 3), 0.25),
            ((1, 3, 2), -0.125),
            ((5, 3, 1, 2, 4), 0.125),
        ],
    )
    def test_values(self, ranks, expected):
        assert xi(ranks).value == expected

    def test_monotone_n10(self):
        assert xi(range(1, 11)).value == pytest.approx(8 / 11, abs=1e-15)

    @pytest.mark.parametrize("n", [2, 3, 7, 50, 1001])
    def test_monotone_both_directions(self, n):
        up = list(range(1, n + 1))
        expected = (n - 2) / (n + 1)
        assert xi(up).value == pytest.approx(expected, abs=1e-15)
        assert xi(up[::-1]).value == pytest.approx(expected, abs=1e-15)

    def test_too_small(self):
        with pytest.raises(SampleTooSmall):
            xi([1])


class TestSpearman:
    @pytest.mark.parametrize(
        "ranks, expected",
        [
            ((1, 2, 3), 1.0),
            ((2, 3, 1), -0.5),
            ((3, 2, 1), -1.0),
            ((5, 3, 1, 2, 4), -0.3),
        ],
    )
    def test_values(self, ranks, expected):
        assert spearman(ranks).value == pytest.approx(expected, abs=1e-15)

    def test_too_small(self):
        with pytest.raises(SampleTooSmall):
            spearman([1])


class TestCombined:
    def test_table_row_123(self):
        assert combined(CorrelationValue(1.0, 3), CorrelationValue(0.25, 3)).value == 1.0

    def test_zero(self):
        assert combined(CorrelationValue(0.0, 9), CorrelationValue(0.0, 9)).value == 0.0

    def test_negative_spearman(self):
        assert combined(CorrelationValue(-0.5, 3), CorrelationValue(-0.125, 3)).value == 0.5

    def test_xi_arm(self):
        assert combined(CorrelationValue(0.1, 9), CorrelationValue(0.5, 9)).value == pytest.approx(
            math.sqrt(2.5) * 0.5
        )

    def test_size_mismatch(self):
        with pytest.raises(SampleSizeMismatch):
            combined(CorrelationValue(0.1, 9), CorrelationValue(0.1, 10))


class TestProperties:
    @given(perms())
    def test_rewritten_spearman_form(self, r):
        n = len(r)
        alt = -3 * (n + 1) / (n - 1) + 12 * sum(i * ri for i, ri in enumerate(r, start=1)) / n / (n * n - 1)
        assert spearman(r).value == pytest.approx(alt, abs=1e-12)

    @given(perms())
    def test_reversal(self, r):
        rs = RankSequence(r)
        rev = rs.reversed_values()
        assert spearman(rev).value == pytest.approx(-spearman(rs).value, abs=1e-12)
        assert xi(rev).value == xi(rs).value

    @given(perms())
    def test_combined_dominates_both_arms(self, r):
        s, x = spearman(r), xi(r)
        i = combined(s, x).value
        assert i >= abs(s.value)
        assert i >= SQRT_5_2 * x.value

    @given(perms())
    def test_exact_integer_numerators(self, r):
        n = len(r)
        a = sum(abs(r[k + 1] - r[k]) for k in range(n - 1))
        b = sum((k - v) ** 2 for k, v in enumerate(r, start=1))
        assert xi(r).value == float(1 - Fraction(3 * a, n * n - 1))
        assert spearman(r).value == float(1 - Fraction(6 * b, n * (n * n - 1)))

    @pytest.mark.parametrize("n", range(2, 9))
    def test_exhaustive_bounds(self, n):
        mat = np.array(list(itertools.permutations(range(1, n + 1))))
        s, x, _ = batch_statistics(mat)
        assert np.all(np.abs(s) <= 1 + 1e-12)
        assert np.all(x <= (n - 2) / (n + 1) + 1e-12)

    def test_batch_matches_scalar(self, gen):
        mat = np.array([gen.permutation(40) + 1 for _ in range(25)])
        s, x, c = batch_statistics(mat)
        for k in range(25):
            assert s[k] == spearman(mat[k]).value
            assert x[k] == xi(mat[k]).value
            assert c[k] == combined(spearman(mat[k]), xi(mat[k])).value

    def test_large_n_integer_sum_is_exact(self):
        n = 2**20
        r = np.arange(n, 0, -1)
        assert spearman(r).value == -1.0
