"""Statistical kernels for scoring empirical values against null ensembles.

z-scores use the sample standard deviation (n-1 denominator); robust
z-scores use the median and the interquartile range under linear-interpolation
quantiles. Normality of an ensemble sample is judged with the Anderson-Darling
test for estimated parameters, small-sample corrected, with the standard
piecewise p-value approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import norm

__all__ = [
    "z_score",
    "robust_z_score",
    "AndersonDarlingResult",
    "anderson_darling_normal",
]

ALPHA_LEVEL = 0.05


def z_score(value: float, samples: Sequence[float]) -> float | None:
    """(value - mean) / sample sd; None when the sd is zero."""
    arr = np.asarray(samples, dtype=float)
    sd = float(arr.std(ddof=1))
    if sd == 0.0:
        return None
    return (float(value) - float(arr.mean())) / sd


def robust_z_score(value: float, samples: Sequence[float]) -> float | None:
    """(value - median) / IQR with linear-interpolation quartiles; None when IQR is zero."""
    arr = np.asarray(samples, dtype=float)
    q1, q2, q3 = np.quantile(arr, [0.25, 0.5, 0.75])
    iqr = float(q3 - q1)
    if iqr == 0.0:
        return None
    return (float(value) - float(q2)) / iqr


@dataclass(frozen=True)
class AndersonDarlingResult:
    statistic: float          # A^2 with estimated mean and sd
    corrected: float          # A*^2 = A^2 (1 + 0.75/n + 2.25/n^2)
    p_value: float
    rejected: bool            # normality rejected at the 5% level

    @property
    def verdict(self) -> str:
        return "rejected" if self.rejected else "not_rejected"


def _ad_p_value(a2c: float) -> float:
    # Piecewise approximation for the case of estimated mean and variance.
    if a2c < 0.2:
        return 1.0 - math.exp(-13.436 + 101.14 * a2c - 223.73 * a2c * a2c)
    if a2c < 0.34:
        return 1.0 - math.exp(-8.318 + 42.796 * a2c - 59.938 * a2c * a2c)
    if a2c < 0.6:
        return math.exp(0.9177 - 4.279 * a2c - 1.38 * a2c * a2c)
    if a2c <= 13.0:
        return math.exp(1.2937 - 5.709 * a2c + 0.0186 * a2c * a2c)
    return 0.0


def anderson_darling_normal(samples: Sequence[float]) -> AndersonDarlingResult:
    """Anderson-Darling normality test with mean and sd estimated from data.

    A degenerate (zero-variance) sample is reported as rejected with an
    infinite statistic: a point mass is as far from normal as it gets.
    """
    arr = np.asarray(samples, dtype=float)
    n = arr.size
    if n < 4:
        raise ValueError("Anderson-Darling needs at least 4 observations")
    sd = arr.std(ddof=1)
    if sd == 0.0:
        return AndersonDarlingResult(math.inf, math.inf, 0.0, True)
    w = (np.sort(arr) - arr.mean()) / sd
    z = norm.cdf(w)
    z = np.clip(z, 1e-300, 1.0 - 1e-16)
    i = np.arange(1, n + 1)
    s = np.sum((2 * i - 1.0) / n * (np.log(z) + np.log1p(-z[::-1])))
    a2 = -n - s
    a2c = a2 * (1.0 + 0.75 / n + 2.25 / (n * n))
    p = min(1.0, max(0.0, _ad_p_value(a2c)))
    return AndersonDarlingResult(float(a2), float(a2c), float(p), p < ALPHA_LEVEL)
