"""Chatterjee's xi, Spearman's rho and the max-combined rank test of independence."""

from .errors import (
    EvenN,
    InputError,
    InvalidLevel,
    InvalidPValue,
    InvalidShape,
    LengthMismatch,
    NonFiniteValue,
    NTooLarge,
    NTooSmallForMoment,
    SampleSizeMismatch,
    SampleTooSmall,
    TiesPresent,
    XispearError,
)
from .inference import (
    FdrResult,
    PSource,
    TestResult,
    bh_adjust,
    combined_pvalue_asymptotic,
    normal_cdf,
    permutation_pvalue,
    spearman_pvalue_asymptotic,
    xi_pvalue_asymptotic,
)
from .measures import CorrelationValue, Method, combined, spearman, xi
from .ranks import PairedSample, RankSequence, TieMode, TiePolicy, concomitant_ranks, validate_permutation

__version__ = "0.1.0"

__all__ = [
    "CorrelationValue", "EvenN", "FdrResult", "InputError", "InvalidLevel", "InvalidPValue",
    "InvalidShape", "LengthMismatch", "Method", "NTooLarge", "NTooSmallForMoment", "NonFiniteValue",
    "PSource", "PairedSample", "RankSequence", "SampleSizeMismatch", "SampleTooSmall", "TestResult",
    "TieMode", "TiePolicy", "TiesPresent", "XispearError", "bh_adjust", "combined",
    "combined_pvalue_asymptotic", "concomitant_ranks", "normal_cdf", "permutation_pvalue", "spearman",
    "spearman_pvalue_asymptotic", "validate_permutation", "xi", "xi_pvalue_asymptotic",
]
