"""Scalar special functions: log-gamma (real and complex), integer-order
lower incomplete gamma, factorials."""
import math

import numpy as np

from ._backend import impl
from .errors import DomainError, PoleError

factorial = math.factorial


def log_gamma_real(x):
    """ln Gamma(x) for real ``x > 0``."""
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise DomainError(f"log_gamma_real requires finite x > 0, got {x}")
    return math.lgamma(x)


def log_gamma_complex(s):
    """Principal branch of ln Gamma(s).

    Lanczos approximation (g = 607/128) for ``Re s >= 0.5``; smaller real
    parts are shifted with the recurrence, which preserves the principal
    branch. Raises :class:`PoleError` at ``0, -1, -2, ...``.
    """
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise DomainError(f"log_gamma_complex requires a finite argument, got {s}")
    if s.imag == 0 and s.real <= 0 and s.real == math.floor(s.real):
        raise PoleError(f"Gamma has a pole at {s.real:g}")
    return impl.loggamma_scalar(s)


def log_gamma_complex_array(s):
    """Vectorised :func:`log_gamma_complex` without the pole check."""
    return impl.loggamma_array(np.asarray(s, dtype=np.complex128))


def lower_incomplete_gamma(n, x):
    """gamma(n, x) = integral_0^x t^(n-1) e^(-t) dt for integer ``n >= 1``.

    Uses the finite sum ``(n-1)! (1 - e^-x sum_{k<n} x^k/k!)`` when
    ``x >= n``. Below that the same quantity is summed as the positive
    tail ``(n-1)! e^-x sum_{k>=n} x^k/k!`` to avoid cancellation.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"order must be a positive integer, got {n}")
    n = int(n)
    x = float(x)
    if x < 0 or math.isnan(x):
        raise DomainError(f"x must be non-negative, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return float(factorial(n - 1))
    scale = float(factorial(n - 1))
    if x >= n:
        term, total = 1.0, 1.0
        for k in range(1, n):
            term *= x / k
            total += term
        return scale * -math.expm1(math.log(total) - x) if total > 0 else scale
    # tail series, terms x^k/k! for k >= n
    term = math.exp(n * math.log(x) - math.lgamma(n + 1) - x)
    total = term
    k = n
    while True:
        k += 1
        term *= x / k
        total += term
        if term < 1e-17 * total:
            break
    return scale * total


def upper_incomplete_gamma_ratio(n, x):
    """Q(n, x) = Gamma(n, x) / Gamma(n) for integer ``n``; 1 - gamma(n,x)/(n-1)!."""
    return 1.0 - lower_incomplete_gamma(n, x) / factorial(int(n) - 1)
