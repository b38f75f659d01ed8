"""Row-wise independence screening of a feature x condition matrix with BH control."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .csvio import ScreenInput
from .errors import InputError
from .inference import FdrResult, PSource, bh_adjust, permutation_counts, pvalue_asymptotic
from .measures import Method, all_statistics
from .ranks import REJECT, PairedSample, TiePolicy, concomitant_ranks


class RowError(InputError):
    def __init__(self, index: int, row_id: str, cause: Exception):
        self.index, self.row_id, self.cause = index, row_id, cause
        super().__init__(f"row {index + 1} ({row_id!r}): {cause}")


@dataclass(frozen=True)
class ScreenResult:
    ids: list[str]
    n: int
    spearman: np.ndarray
    xi: np.ndarray
    combined: np.ndarray
    raw_p: dict
    fdr: dict
    method: Method
    p_source: PSource

    def rows(self):
        f = self.fdr[self.method]
        for k, rid in enumerate(self.ids):
            yield (rid, self.n, self.spearman[k], self.xi[k], self.combined[k],
                   f.raw_p[k], f.adjusted_p[k], bool(f.rejected[k]))

    def rejected_counts(self) -> dict:
        return {m: self.fdr[m].n_rejected for m in Method}


HEADER = ("id", "n", "spearman", "xi", "combined", "p_raw", "p_adjusted", "rejected")


def screen(
    data: ScreenInput,
    method: Method | str = Method.COMBINED,
    q: float = 0.05,
    *,
    pvalue_mode: PSource | str = PSource.ASYMPTOTIC,
    permutations: int = 999,
    seed: int = 0,
    policy: TiePolicy = REJECT,
    threads: int | None = None,
) -> ScreenResult:
    """Test every row against the condition vector and adjust each method by BH.

    All three methods are always computed (permutation p-values share the same
    permuted rank draws); ``method`` selects which one the output rows report.
    """
    method = Method(method)
    mode = PSource(pvalue_mode)
    if mode is PSource.EXACT:
        raise InputError("screening supports asymptotic or permutation p-values")
    if len(data.ids) == 0:
        raise InputError("empty matrix")
    n = data.x.size

    def work(k: int):
        try:
            ranks = concomitant_ranks(PairedSample(data.x, data.matrix[k]), policy)
        except InputError as exc:
            raise RowError(k, data.ids[k], exc) from exc
        st = all_statistics(ranks)
        if mode is PSource.ASYMPTOTIC:
            ps = [pvalue_asymptotic(Method.SPEARMAN, st.spearman, n),
                  pvalue_asymptotic(Method.CHATTERJEE, st.xi, n),
                  pvalue_asymptotic(Method.COMBINED, st.combined, n)]
        else:
            pc = permutation_counts(ranks, permutations, seed, key=(rng.SCREEN_DOMAIN, k), threads=1)
            ps = [pc.pvalue(m) for m in Method]
        return (st.spearman, st.xi, st.combined, *ps)

    out = np.array(rng.run_ordered(work, range(len(data.ids)), threads), dtype=float)
    raw = {m: out[:, 3 + j] for j, m in enumerate(Method)}
    fdr: dict[Method, FdrResult] = {m: bh_adjust(raw[m], q) for m in Method}
    return ScreenResult(list(data.ids), n, out[:, 0], out[:, 1], out[:, 2], raw, fdr, method, mode)
