"""Kolmogorov-Smirnov statistics and asymptotic critical values."""
import math

import numpy as np


def ks_critical_value(alpha, n, m=None):
    """Asymptotic critical value of the KS statistic at level ``alpha``.

    One-sample: ``c(alpha) / sqrt(n)``; two-sample:
    ``c(alpha) * sqrt((n + m) / (n m))`` with ``c(alpha) = sqrt(-log(alpha/2)/2)``.
    """
    c = math.sqrt(-math.log(alpha / 2.0) / 2.0)
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))


def ks_statistic(sample, cdf):
    """One-sample statistic ``sup |F_n - F|`` for a vectorised ``cdf``."""
    x = np.sort(np.asarray(sample, dtype=np.float64))
    n = x.size
    f = np.clip(np.asarray(cdf(x), dtype=np.float64), 0.0, 1.0)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_2sample_statistic(x, y):
    """Two-sample statistic ``sup |F_x - F_y|``."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    grid = np.concatenate([x, y])
    fx = np.searchsorted(x, grid, side="right") / x.size
    fy = np.searchsorted(y, grid, side="right") / y.size
    return float(np.max(np.abs(fx - fy)))
