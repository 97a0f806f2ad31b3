"""Binomial error-rate estimates, their comparison, and exponent slope fits."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress
from statsmodels.stats.proportion import proportion_confint, proportions_ztest


@dataclass(frozen=True)
class PeEstimate:
    """Empirical error probability at ``n`` received symbols, 95% Wilson CI."""

    n: int
    failures: int
    trials: int
    p_hat: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, n: int, failures: int, trials: int, alpha: float = 0.05) -> "PeEstimate":
        if trials <= 0:
            raise ValueError("trials must be positive")
        if not 0 <= failures <= trials:
            raise ValueError("failures must lie in [0, trials]")
        lo, hi = wilson_interval(failures, trials, alpha)
        p = failures / trials
        return cls(int(n), int(failures), int(trials), p, min(lo, p), max(hi, p))

    @property
    def censored(self) -> bool:
        return self.failures == 0


def wilson_interval(failures: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    lo, hi = proportion_confint(failures, trials, alpha=alpha, method="wilson")
    return max(0.0, float(lo)), min(1.0, float(hi))


def two_proportion_pvalue(fail_a: int, trials_a: int, fail_b: int, trials_b: int) -> float:
    """Two-sided pooled z-test of equal error rates; 1.0 when both are 0 or 1."""
    pooled = (fail_a + fail_b) / (trials_a + trials_b)
    if pooled in (0.0, 1.0):
        return 1.0
    _, p = proportions_ztest([fail_a, fail_b], [trials_a, trials_b])
    return float(p)


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    stderr: float
    intercept: float
    used_n: tuple[int, ...]
    censored_n: tuple[int, ...]
    sparse_n: tuple[int, ...]


def fit_exponent(estimates, min_points: int = 3, min_failures: int = 5) -> ExponentFit:
    """Least-squares slope of ``-log p_hat`` against ``N``.

    Points with no failures are censored and points with fewer than
    ``min_failures`` failures are too noisy to use; both are reported,
    never silently fitted.
    """
    used, censored, sparse = [], [], []
    for e in estimates:
        if e.failures == 0:
            censored.append(e)
        elif e.failures < min_failures:
            sparse.append(e)
        else:
            used.append(e)
    if len(used) < min_points:
        raise InsufficientData(
            f"need >= {min_points} points with >= {min_failures} failures, have {len(used)} "
            f"(censored N={[e.n for e in censored]}, sparse N={[e.n for e in sparse]})")
    n = np.array([e.n for e in used], dtype=float)
    y = -np.log([e.p_hat for e in used])
    if np.ptp(n) == 0:
        raise InsufficientData("fit needs at least two distinct N values")
    res = linregress(n, y)
    se = float(res.stderr) if math.isfinite(res.stderr) else 0.0
    return ExponentFit(float(res.slope), se, float(res.intercept), tuple(int(e.n) for e in used),
                       tuple(e.n for e in censored), tuple(e.n for e in sparse))
