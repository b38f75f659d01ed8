"""Synthetic alternatives, power curves, p-value bias and null scatter data.

Every routine splits its replicates into fixed blocks of ``rng.BLOCK`` and
draws block ``b`` from its own stream, so output is bitwise identical for
any ``threads`` value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import rng
from .errors import InputError, SampleTooSmall
from .inference import PSource, permutation_counts, pvalue_asymptotic, statistic_for
from .measures import Method, batch_statistics
from .ranks import PairedSample, batch_concomitant_ranks


class Scenario(str, Enum):
    NULL = "null"
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    SINUSOID = "sinusoid"
    STEPWISE = "stepwise"


NOISE_SCALE = {
    Scenario.NULL: 1.0,
    Scenario.LINEAR: 1.0,
    Scenario.QUADRATIC: 0.3,
    Scenario.SINUSOID: 0.75,
    Scenario.STEPWISE: 2.0,
}


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: Scenario
    n: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        if self.n < 2:
            raise SampleTooSmall(f"need n >= 2, got {self.n}")
        rng.check_seed(self.seed)


@dataclass(frozen=True)
class PowerEstimate:
    scenario: Scenario
    n: int
    test: Method
    alpha: float
    runs: int
    power: float
    mc_std_error: float

    def row(self) -> dict:
        return {
            "scenario": self.scenario.value,
            "n": self.n,
            "test": self.test.value,
            "alpha": self.alpha,
            "runs": self.runs,
            "power": self.power,
            "se": self.mc_std_error,
        }


@dataclass(frozen=True)
class BiasRecord:
    n: int
    runs: int
    permutations: int
    test: Method
    mean_bias: float
    bias_samples: np.ndarray

    def row(self) -> dict:
        return {
            "n": self.n,
            "runs": self.runs,
            "permutations": self.permutations,
            "test": self.test.value,
            "mean_bias": self.mean_bias,
        }


def stepwise(x: np.ndarray) -> np.ndarray:
    # Level k covers (-1 + (k-1)/2, -1 + k/2]; the first level also includes -1.
    return (
        1.0 * ((x >= -1.0) & (x <= -0.5))
        + 2.0 * ((x > -0.5) & (x <= 0.0))
        + 3.0 * ((x > 0.0) & (x <= 0.5))
        + 4.0 * ((x > 0.5) & (x <= 1.0))
    )


def signal(scenario: Scenario, x: np.ndarray) -> np.ndarray:
    if scenario is Scenario.NULL:
        return np.zeros_like(x)
    if scenario is Scenario.LINEAR:
        return x
    if scenario is Scenario.QUADRATIC:
        return x * x
    if scenario is Scenario.SINUSOID:
        return np.cos(2 * np.pi * x)
    return stepwise(x)


def draw(scenario: Scenario, gen: np.random.Generator, shape, noise: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """X ~ U[-1, 1], eps ~ N(0, 1) (drawn in that order), Y = f(X) + scale * eps."""
    scenario = Scenario(scenario)
    x = gen.uniform(-1.0, 1.0, size=shape)
    eps = gen.standard_normal(size=shape)
    y = signal(scenario, x)
    if noise:
        y = y + NOISE_SCALE[scenario] * eps
    return x, y


def generate(spec: ScenarioSpec, noise: bool = True) -> PairedSample:
    """One sample of ``spec``; ``noise=False`` zeroes the error term."""
    x, y = draw(spec.scenario, rng.stream(spec.seed, rng.SCENARIO_DOMAIN), spec.n, noise)
    return PairedSample(x, y)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")


def rejection_counts(
    spec: ScenarioSpec,
    alpha: float,
    runs: int,
    *,
    pvalue_mode: PSource | str = PSource.ASYMPTOTIC,
    permutations: int = 1000,
    threads: int | None = None,
) -> dict[Method, int]:
    """Number of runs rejected at level ``alpha`` by each test on shared samples."""
    _check_alpha(alpha)
    if runs < 1:
        raise InputError("runs must be positive")
    mode = PSource(pvalue_mode)
    if mode is PSource.EXACT:
        raise InputError("power studies support asymptotic or permutation p-values")
    n = spec.n

    def work(block):
        b, lo, hi = block
        x, y = draw(spec.scenario, rng.stream(spec.seed, rng.SCENARIO_DOMAIN, b), (hi - lo, n))
        ranks = batch_concomitant_ranks(x, y)
        out = np.zeros(3, dtype=np.int64)
        if mode is PSource.ASYMPTOTIC:
            s, xi_, comb = batch_statistics(ranks)
            for k, (m, stat) in enumerate(((Method.SPEARMAN, s), (Method.CHATTERJEE, xi_), (Method.COMBINED, comb))):
                out[k] = int((pvalue_asymptotic(m, stat, n) <= alpha).sum())
            return out
        for row in range(hi - lo):
            pc = permutation_counts(ranks[row], permutations, spec.seed, key=(rng.SCENARIO_DOMAIN, b, row), threads=1)
            out += [pc.pvalue(m) <= alpha for m in Method]
        return out

    jobs = [(b, lo, hi) for b, (lo, hi) in enumerate(rng.blocks(runs))]
    total = np.sum(rng.run_ordered(work, jobs, threads), axis=0)
    return dict(zip(Method, (int(t) for t in total)))


def estimate_power(
    spec: ScenarioSpec,
    test: Method | str,
    alpha: float = 0.05,
    runs: int = 5000,
    *,
    pvalue_mode: PSource | str = PSource.ASYMPTOTIC,
    permutations: int = 1000,
    threads: int | None = None,
) -> PowerEstimate:
    """Fraction of ``runs`` simulated samples whose p-value is at most ``alpha``."""
    if runs < 100:
        raise InputError(f"power estimates need runs >= 100, got {runs}")
    return power_table(spec, alpha, runs, tests=[test], pvalue_mode=pvalue_mode,
                       permutations=permutations, threads=threads)[0]


def power_table(
    spec: ScenarioSpec,
    alpha: float = 0.05,
    runs: int = 5000,
    *,
    tests=tuple(Method),
    pvalue_mode: PSource | str = PSource.ASYMPTOTIC,
    permutations: int = 1000,
    threads: int | None = None,
) -> list[PowerEstimate]:
    counts = rejection_counts(spec, alpha, runs, pvalue_mode=pvalue_mode,
                              permutations=permutations, threads=threads)
    out = []
    for t in tests:
        t = Method(t)
        power = counts[t] / runs
        out.append(PowerEstimate(spec.scenario, spec.n, t, alpha, runs, power,
                                 math.sqrt(power * (1 - power) / runs)))
    return out


def bias_study(
    n: int,
    runs: int = 1000,
    permutations: int = 5000,
    test: Method | str = Method.COMBINED,
    seed: int = 0,
    *,
    threads: int | None = None,
) -> BiasRecord:
    """Asymptotic minus permutation p-value over ``runs`` null samples.

    Null samples have X ~ U[-1, 1] and Y ~ N(0, 1) independently.
    """
    test = Method(test)
    if n < 2:
        raise SampleTooSmall(f"need n >= 2, got {n}")
    if runs < 1 or permutations < 1:
        raise InputError("runs and permutations must be positive")

    def work(r: int) -> float:
        x, y = draw(Scenario.NULL, rng.stream(seed, rng.BIAS_DOMAIN, r), (1, n))
        ranks = batch_concomitant_ranks(x, y)[0]
        s, xi_, comb = (float(v) for v in batch_statistics(ranks))
        p_asym = pvalue_asymptotic(test, statistic_for(test, s, xi_, comb), n)
        pc = permutation_counts(ranks, permutations, seed, key=(rng.BIAS_DOMAIN, r), threads=1)
        return p_asym - pc.pvalue(test)

    samples = np.array(rng.run_ordered(work, range(runs), threads))
    return BiasRecord(n, runs, permutations, test, float(samples.mean()), samples)


def null_joint_sample(n: int, replicates: int, seed: int = 0, *, threads: int | None = None) -> np.ndarray:
    """``(replicates, 2)`` array of ``(sqrt(n) S, sqrt(n) xi)`` over uniform permutations."""
    if n < 2:
        raise SampleTooSmall(f"need n >= 2, got {n}")
    if replicates < 1:
        raise InputError("replicates must be positive")

    def work(block):
        b, lo, hi = block
        perms = rng.random_permutations(rng.stream(seed, rng.NULL_DOMAIN, b), hi - lo, n)
        s, xi_, _ = batch_statistics(perms)
        return np.column_stack([s, xi_])

    jobs = [(b, lo, hi) for b, (lo, hi) in enumerate(rng.blocks(replicates))]
    return math.sqrt(n) * np.vstack(rng.run_ordered(work, jobs, threads))
