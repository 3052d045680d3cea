"""The two Meijer G shapes that describe products of gamma and beta variables.

``G^{n,0}_{0,n}(x | a_1..a_n)`` is evaluated from its Mellin-Barnes integral
along a vertical line (trapezoid rule, refined until stable).
``G^{n,0}_{n,n}(x | r ; r - 1)`` has Mellin transform ``prod 1/(s + r_j - 1)``
and is evaluated exactly from partial fractions.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from ._backend import impl
from .errors import ConvergenceError, DomainError

__all__ = [
    "ContourConfig",
    "RootGroup",
    "PartialFractionExpansion",
    "eval_g_0n",
    "eval_g_0n_with_error",
    "eval_g_nn_beta",
    "eval_g_nn_beta_with_error",
    "integrate_g_nn_beta",
    "partial_fraction_expand",
    "pn_density",
    "pn_density_with_error",
    "g_0n_log_asymptotic",
    "default_abscissa",
    "saddle_abscissa",
]

LOG_FLOOR = math.log(1e-20)
MERGE_TOL = 1e-9
MIN_GAP = 0.1
EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class ContourConfig:
    """Controls for the Mellin-Barnes trapezoid rule.

    Attributes
    ----------
    abscissa : float or None
        Real part ``c`` of the integration line. ``None`` uses the real
        saddle point of the integrand (see :func:`saddle_abscissa`), which
        minimises cancellation; any ``c > -min a`` is valid.
    truncation : float or None
        Fixed half-height ``T`` of the line; ``None`` grows ``T`` until the
        integrand modulus falls 1e-20 below its value on the real axis.
    step : float
        Initial trapezoid spacing, halved until two successive refinements
        agree within ``tolerance``.
    tolerance : float
        Relative agreement required between refinements.
    max_refinements : int
        Maximum number of halvings before :class:`ConvergenceError`.
    residue_series : bool
        Allow the residue series for ``x < residue_threshold`` when no two
        parameters differ by an integer.
    """

    abscissa: float | None = None
    truncation: float | None = None
    step: float = 0.5
    tolerance: float = 1e-12
    max_refinements: int = 16
    residue_series: bool = False
    residue_threshold: float = 1e-3

    def __post_init__(self):
        if self.truncation is not None and not self.truncation > 0:
            raise DomainError("truncation must be positive")
        if not self.step > 0 or not self.tolerance > 0:
            raise DomainError("step and tolerance must be positive")
        if self.max_refinements < 1:
            raise DomainError("max_refinements must be at least 1")


DEFAULT_CONFIG = ContourConfig()


def _as_params(a):
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    if a.ndim != 1 or a.size == 0:
        raise DomainError("parameter vector must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(a)):
        raise DomainError("parameters must be finite")
    return a


def _check_x(x):
    x = float(x)
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"x must be a finite positive real, got {x}")
    return x


def default_abscissa(a):
    a = _as_params(a)
    return max(0.0, -float(a.min())) + 1.0


def saddle_abscissa(x, a, min_gap=MIN_GAP):
    """Real saddle point of ``x**(-c) prod Gamma(c + a_j)`` for ``c > -min a``.

    Solves ``sum(digamma(c + a_j)) = log x``; the root always exists since
    the left side runs from -inf to +inf. Clamped to at least ``min_gap``
    right of the rightmost pole.
    """
    a = _as_params(a)
    logx = math.log(_check_x(x))
    lo = -float(a.min()) + min_gap
    g = lambda c: float(np.sum(special.digamma(c + a))) - logx
    if g(lo) >= 0:
        return lo
    hi = lo + 1.0
    while g(hi) < 0:
        hi = lo + 2.0 * (hi - lo)
    return optimize.brentq(g, lo, hi, xtol=1e-8)


def _mellin_barnes(logx, a, cfg):
    c = cfg.abscissa
    if c is None:
        c = saddle_abscissa(math.exp(logx), a)
    elif not c > -float(a.min()):
        raise DomainError(
            f"abscissa {c} does not separate the poles (needs c > {-float(a.min())})")
    c = float(c)

    peak = impl.mb_log_integrand(logx, a, c, 0.0).real
    if cfg.truncation is not None:
        T = float(cfg.truncation)
    else:
        T = 4.0
        while impl.mb_log_integrand(logx, a, c, T).real - peak > LOG_FLOOR:
            T *= 2.0
            if T > 1e6:
                raise ConvergenceError("integrand does not decay along the contour")

    h = float(cfg.step)
    count = int(math.ceil(T / h))
    f0 = math.exp(impl.mb_log_integrand(logx, a, c, 0.0).real - peak)
    total = f0 / 2.0 + impl.mb_sum(logx, a, c, h, h, count, peak)
    est = h / math.pi * total
    # scale of the integral of |integrand|, for an absolute floor under cancellation
    tau = h * np.arange(count + 1)
    mod = np.exp(np.real(impl.mb_log_integrand(logx, a, c, tau)) - peak)
    scale = h / math.pi * (mod.sum() - mod[0] / 2.0)
    floor = 64.0 * np.finfo(float).eps * scale

    agreed = 0
    diff = math.inf
    for _ in range(cfg.max_refinements):
        odd_count = int(math.ceil(T / h))
        h /= 2.0
        odd = impl.mb_sum(logx, a, c, h, 2.0 * h, odd_count, peak)
        new = est / 2.0 + h / math.pi * odd
        diff = abs(new - est)
        est = new
        if diff <= max(cfg.tolerance * abs(est), floor):
            agreed += 1
            if agreed == 2:
                break
        else:
            agreed = 0
    else:
        raise ConvergenceError(
            f"Mellin-Barnes trapezoid stalled: change {diff:.3e} at step {h:.3e}")
    value = est * math.exp(peak)
    err = max(diff, floor) * math.exp(peak)
    if value < 0 and -value <= 2 * err:
        value = 0.0
    return value, err


def _residue_series(x, a):
    n = a.size
    logx = math.log(x)
    total = 0.0
    for j in range(n):
        others = np.delete(a, j)
        acc = 0.0
        k = 0
        while True:
            g = 1.0
            for ai in others:
                g *= math.gamma(ai - a[j] - k)
            term = (-x) ** k / math.factorial(k) * g
            acc += term
            if k > 3 and abs(term) <= 1e-17 * abs(acc):
                break
            k += 1
            if k > 200:
                raise ConvergenceError("residue series did not converge")
        total += math.exp(a[j] * logx) * acc
    return total


def _residue_allowed(a):
    d = a[:, None] - a[None, :]
    off = d[~np.eye(a.size, dtype=bool)]
    return bool(np.all(np.abs(off - np.round(off)) > 1e-3))


def _g02_convolution(x, a1, a2):
    # int_0^inf y^(a1-1) e^-y (x/y)^a2 e^(-x/y) dy with y = e^v
    logx = math.log(x)

    def integrand(v):
        if abs(v) > 700.0:
            return 0.0
        return math.exp(a1 * v - math.exp(v) + a2 * (logx - v) - x * math.exp(-v))

    mid = 0.5 * logx
    val1, err1 = integrate.quad(integrand, -np.inf, mid, epsabs=0, epsrel=1e-13, limit=200)
    val2, err2 = integrate.quad(integrand, mid, np.inf, epsabs=0, epsrel=1e-13, limit=200)
    return val1 + val2, err1 + err2


def eval_g_0n_with_error(x, a, config=None, method="auto"):
    """``G^{n,0}_{0,n}(x | a)`` together with an error estimate.

    Parameters
    ----------
    x : float
        Positive argument.
    a : sequence of float
        Lower parameters, each greater than -1.
    config : ContourConfig, optional
    method : {'auto', 'mellin_barnes', 'residue', 'convolution'}
        'convolution' is the independent 1-D integral available for
        ``n == 2`` only; 'residue' requires non-integer parameter gaps.

    Returns
    -------
    (value, abs_error) : tuple of float
    """
    x = _check_x(x)
    a = _as_params(a)
    if np.any(a <= -1):
        raise DomainError(f"every parameter must exceed -1, got {a.tolist()}")
    cfg = DEFAULT_CONFIG if config is None else config
    n = a.size
    if method == "auto":
        if n == 1:
            return math.exp(a[0] * math.log(x) - x), 0.0
        if cfg.residue_series and x < cfg.residue_threshold and _residue_allowed(a):
            method = "residue"
        else:
            method = "mellin_barnes"
    if method == "mellin_barnes":
        return _mellin_barnes(math.log(x), a, cfg)
    if method == "residue":
        if n > 1 and not _residue_allowed(a):
            raise DomainError("residue series needs non-integer parameter differences")
        if n == 1:
            return math.exp(a[0] * math.log(x) - x), 0.0
        val = _residue_series(x, a)
        return val, 1e-15 * abs(val)
    if method == "convolution":
        if n != 2:
            raise DomainError("convolution path is only available for n = 2")
        return _g02_convolution(x, float(a[0]), float(a[1]))
    raise ValueError(f"unknown method {method!r}")


def eval_g_0n(x, a, config=None, method="auto"):
    """``G^{n,0}_{0,n}(x | a_1..a_n)``, i.e. ``prod Gamma(a_j + 1)`` times the
    density at ``x`` of a product of independent ``Gamma(a_j + 1, 1)``.

    >>> round(eval_g_0n(1.0, [0.0]), 10)
    0.3678794412
    """
    return eval_g_0n_with_error(x, a, config, method)[0]


def g_0n_log_asymptotic(t, a):
    """Leading large-``t`` behaviour of ``log G^{n,0}_{0,n}(t | a)``."""
    a = _as_params(a)
    n = a.size
    theta = (float(a.sum()) - (n - 1) / 2.0) / n
    return ((n - 1) / 2.0 * math.log(2 * math.pi) - 0.5 * math.log(n)
            + theta * math.log(t) - n * t ** (1.0 / n))


@dataclass(frozen=True)
class RootGroup:
    """Poles of ``prod 1/(s + rho_j)`` sharing the root ``rho``.

    ``coefficients[i]`` multiplies ``1/(s + rho)**(i + 1)``.
    """

    root: float
    multiplicity: int
    coefficients: tuple


@dataclass(frozen=True)
class PartialFractionExpansion:
    groups: tuple
    shapes: tuple

    def rational(self, s):
        """Evaluate the expansion at complex ``s``."""
        return sum(c / (s + g.root) ** (i + 1)
                   for g in self.groups for i, c in enumerate(g.coefficients))


def _check_shapes(r):
    r = _as_params(r)
    if np.any(r <= 0):
        raise DomainError(f"shape parameters must be positive, got {r.tolist()}")
    return r


@functools.lru_cache(maxsize=256)
def _expand(shapes, merge_tol):
    rho = sorted(s - 1.0 for s in shapes)
    clusters = [[rho[0]]]
    for v in rho[1:]:
        if v - clusters[-1][-1] <= merge_tol:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    roots = [(math.fsum(cl) / len(cl), len(cl)) for cl in clusters]
    groups = []
    for g, (root, m) in enumerate(roots):
        others = [(rh - root, mh) for h, (rh, mh) in enumerate(roots) if h != g]
        # Taylor coefficients b_k of prod (s + rho_h)^(-m_h) about s = -root
        b = [math.prod(d ** -mh for d, mh in others)]
        ell = [0.0] + [
            math.fsum(-mh * (-1) ** (k - 1) / (k * d ** k) for d, mh in others)
            for k in range(1, m)
        ]
        for k in range(1, m):
            b.append(math.fsum(j * ell[j] * b[k - j] for j in range(1, k + 1)) / k)
        groups.append(RootGroup(root, m, tuple(b[m - i] for i in range(1, m + 1))))
    return PartialFractionExpansion(tuple(groups), tuple(shapes))


def partial_fraction_expand(r, merge_tol=MERGE_TOL):
    """Partial fractions of ``prod_j 1/(s + r_j - 1)``.

    Roots closer than ``merge_tol`` are merged into one group of higher
    multiplicity. For distinct roots the coefficient of ``1/(s + r_k - 1)``
    is ``1 / prod_{j != k} (r_j - r_k)``.
    """
    r = _check_shapes(r)
    return _expand(tuple(float(v) for v in r), float(merge_tol))


def eval_g_nn_beta_with_error(x, r, merge_tol=MERGE_TOL):
    """:func:`eval_g_nn_beta` with a rounding error bound.

    The closed form is exact; its error is rounding in the partial fraction
    sum, bounded by a few ulps of the sum of absolute terms (large when
    roots nearly coalesce).
    """
    x = float(x)
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    pfe = partial_fraction_expand(r, merge_tol)
    L = -math.log(x)
    total = []
    for g in pfe.groups:
        xp = math.exp(g.root * math.log(x))
        term = 1.0
        for i, c in enumerate(g.coefficients):
            if i:
                term *= L / i
            total.append(c * xp * term)
    val = math.fsum(total)
    err = 4.0 * len(total) * EPS * math.fsum(abs(t) for t in total)
    return max(val, 0.0), err


def eval_g_nn_beta(x, r, merge_tol=MERGE_TOL):
    """``G^{n,0}_{n,n}(x | r_1..r_n ; r_1-1..r_n-1)`` for ``0 < x < 1``.

    Equals the density of a product of independent ``Beta(r_k, 1)``
    variables divided by ``prod r_k``. Closed form from partial fractions:
    ``1/(s + rho)^(i+1)`` inverts to ``x^rho log(1/x)^i / i!``.
    """
    return eval_g_nn_beta_with_error(x, r, merge_tol)[0]


def integrate_g_nn_beta(x, r, merge_tol=MERGE_TOL):
    """``integral_0^x G^{n,0}_{n,n}(t | r ; r-1) dt`` in closed form."""
    x = float(x)
    if not 0 <= x <= 1:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    pfe = partial_fraction_expand(r, merge_tol)
    if x == 0:
        return 0.0
    L = -math.log(x)
    total = []
    for g in pfe.groups:
        k = g.root + 1.0
        xp = math.exp(k * math.log(x))
        for q, c in enumerate(g.coefficients):
            # integral_0^x t^rho log(1/t)^q / q! dt
            acc = 0.0
            for j in range(q + 1):
                acc += L ** (q - j) / math.factorial(q - j) / k ** (j + 1)
            total.append(c * xp * acc)
    return math.fsum(total)


def pn_density_with_error(x, n, config=None):
    """Density of a product of ``n`` independent standard normals, with an
    absolute error estimate.

    Uses ``p(x) = (2 pi)^(-n/2) G^{n,0}_{0,n}(x^2 / 2^n | 0, ..., 0)``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("x must be finite")
    if n == 1:
        return math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi), 0.0
    if x == 0:
        raise DomainError("product normal density diverges at 0 for n >= 2")
    val, err = eval_g_0n_with_error(x * x / 2.0 ** n, np.zeros(n), config)
    scale = (2 * math.pi) ** (n / 2)
    return val / scale, float(err) / scale


def pn_density(x, n, config=None):
    """Density of a product of ``n`` independent standard normals."""
    return pn_density_with_error(x, n, config)[0]
