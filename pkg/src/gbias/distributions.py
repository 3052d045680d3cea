"""Laws used throughout the package, with samplers, densities and CDFs.

Covers the gamma and ``Beta(r, 1)`` building blocks, their products
(product gamma ``PG(r)``, product beta ``V_n``, product normal ``PN(n)``),
point masses, empirical laws, the size bias transformation and the gamma
bias transformation of order ``n``, ``W^{G(n)} = V_n W^s``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate, special

from ._parallel import ordered_map
from .errors import ConvergenceError, DomainError, MeanMismatchError, UnsupportedKindError
from .meijer_kernel import (
    EPS,
    eval_g_0n,
    eval_g_0n_with_error,
    eval_g_nn_beta,
    eval_g_nn_beta_with_error,
    g_0n_log_asymptotic,
    integrate_g_nn_beta,
    pn_density_with_error,
)
from .rng import DEFAULT_SEED, make_rng
from .specfun import lower_incomplete_gamma

CHUNK = 1 << 16
SEPARATION = 1e-2  # roots closer than this skip the distinct-parameter formulas

# stream namespaces so that derived batches never share random numbers
_DIRECT, _SIZE_BIASED, _PRODUCT_BETA = 0, 1, 2


def _shapes(r):
    r = tuple(float(v) for v in np.atleast_1d(np.asarray(r, dtype=np.float64)))
    if not r or not all(v > 0 and math.isfinite(v) for v in r):
        raise DomainError(f"shape parameters must be positive and finite, got {list(r)}")
    return r


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class Gamma:
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("Gamma shape must be positive")


@dataclass(frozen=True)
class BetaR1:
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("Beta(r, 1) shape must be positive")


@dataclass(frozen=True)
class ProductGamma:
    r: tuple

    def __post_init__(self):
        object.__setattr__(self, "r", _shapes(self.r))


@dataclass(frozen=True)
class ProductBetaVn:
    r: tuple

    def __post_init__(self):
        object.__setattr__(self, "r", _shapes(self.r))


@dataclass(frozen=True)
class ProductNormal:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("ProductNormal needs a positive integer n")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class PointMass:
    c: float

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise DomainError("PointMass location must be finite")


@dataclass(frozen=True, eq=False)
class Empirical:
    """Law of a finite sample, optionally weighted (weights need not sum to 1)."""

    values: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if v.size == 0:
            raise DomainError("Empirical law needs at least one value")
        object.__setattr__(self, "values", v)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=np.float64).ravel()
            if w.shape != v.shape or np.any(w < 0) or not w.sum() > 0:
                raise DomainError("weights must be non-negative, not all zero, one per value")
            object.__setattr__(self, "weights", w / w.sum())

    @property
    def probabilities(self):
        if self.weights is None:
            return np.full(self.values.size, 1.0 / self.values.size)
        return self.weights


@dataclass(frozen=True)
class GammaBiased:
    """The ``W``-gamma biased law of order ``n`` for base law ``W``."""

    base: object
    r: tuple

    def __post_init__(self):
        object.__setattr__(self, "r", _shapes(self.r))
        check_mean_match(self.base, self.r)


def describe(d):
    """JSON-ready ``{kind, params}`` for a descriptor."""
    if isinstance(d, (Gamma, BetaR1)):
        params = {"r": d.r}
    elif isinstance(d, (ProductGamma, ProductBetaVn)):
        params = {"r": list(d.r)}
    elif isinstance(d, ProductNormal):
        params = {"n": d.n}
    elif isinstance(d, PointMass):
        params = {"c": d.c}
    elif isinstance(d, Empirical):
        params = {"size": int(d.values.size), "weighted": d.weights is not None}
    elif isinstance(d, GammaBiased):
        params = {"base": describe(d.base), "r": list(d.r)}
    else:
        raise UnsupportedKindError(f"unknown descriptor {d!r}")
    return {"kind": type(d).__name__, "params": params}


def mean(d):
    """``E W`` for a descriptor."""
    if isinstance(d, Gamma):
        return d.r
    if isinstance(d, BetaR1):
        return d.r / (d.r + 1.0)
    if isinstance(d, ProductGamma):
        return math.prod(d.r)
    if isinstance(d, ProductBetaVn):
        return math.prod(v / (v + 1.0) for v in d.r)
    if isinstance(d, ProductNormal):
        return 0.0
    if isinstance(d, PointMass):
        return d.c
    if isinstance(d, Empirical):
        return float(np.dot(d.probabilities, d.values))
    if isinstance(d, GammaBiased):
        # E V_n * E W^s with E W^s = E W^2 / E W
        return mean(ProductBetaVn(d.r)) * second_moment(d.base) / mean(d.base)
    raise UnsupportedKindError(f"mean not available for {type(d).__name__}")


def second_moment(d):
    if isinstance(d, Gamma):
        return d.r * (d.r + 1.0)
    if isinstance(d, ProductGamma):
        return math.prod(v * (v + 1.0) for v in d.r)
    if isinstance(d, BetaR1):
        return d.r / (d.r + 2.0)
    if isinstance(d, ProductBetaVn):
        return math.prod(v / (v + 2.0) for v in d.r)
    if isinstance(d, PointMass):
        return d.c * d.c
    if isinstance(d, Empirical):
        return float(np.dot(d.probabilities, d.values ** 2))
    raise UnsupportedKindError(f"second moment not available for {type(d).__name__}")


def check_mean_match(d, r, rtol=1e-9):
    """Raise :class:`MeanMismatchError` unless ``prod r == E W`` to ``rtol``."""
    mu = mean(d)
    prod = math.prod(_shapes(r))
    if not mu > 0:
        raise MeanMismatchError(f"E W must be positive, got {mu}")
    if abs(prod - mu) > rtol * abs(mu):
        raise MeanMismatchError(f"product of shapes {prod} differs from E W = {mu}")


# ---------------------------------------------------------------------------
# sampling


@dataclass(eq=False)
class SampleBatch:
    """Draws together with the seed and law that produced them."""

    values: np.ndarray
    seed: int
    descriptor: object
    size: int = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.size = int(self.values.size)

    def sidecar(self):
        info = describe(self.descriptor)
        return {"kind": info["kind"], "params": info["params"],
                "seed": int(self.seed), "N": self.size}

    def to_csv(self, path):
        """Write ``path`` (header ``value``) and ``path`` + ``.json`` sidecar."""
        path = Path(path)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["value"])
            for v in self.values:
                w.writerow([repr(float(v))])
        side = path.with_name(path.name + ".json")
        side.write_text(json.dumps(self.sidecar(), indent=2) + "\n", encoding="utf-8")
        return path, side

    @staticmethod
    def read_csv(path):
        """Values from a batch CSV written by :meth:`to_csv`."""
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != ["value"]:
            raise DomainError(f"{path}: expected header 'value'")
        return np.array([float(r[0]) for r in rows[1:]])


def _draw(d, rng, m):
    if isinstance(d, Gamma):
        return rng.standard_gamma(d.r, m)
    if isinstance(d, BetaR1):
        return rng.random(m) ** (1.0 / d.r)
    if isinstance(d, ProductGamma):
        out = np.ones(m)
        for v in d.r:
            out *= rng.standard_gamma(v, m)
        return out
    if isinstance(d, ProductBetaVn):
        out = np.ones(m)
        for v in d.r:
            out *= rng.random(m) ** (1.0 / v)
        return out
    if isinstance(d, ProductNormal):
        out = np.ones(m)
        for _ in range(d.n):
            out *= rng.standard_normal(m)
        return out
    if isinstance(d, PointMass):
        return np.full(m, d.c)
    if isinstance(d, Empirical):
        idx = rng.choice(d.values.size, size=m, p=d.probabilities)
        return d.values[idx]
    raise UnsupportedKindError(f"cannot sample {type(d).__name__}")


def _draw_stream(d, n, seed, namespace):
    # fixed-size chunks keyed by (seed, namespace, chunk) keep output
    # independent of the number of worker threads
    chunks = [(i, min(CHUNK, n - i * CHUNK)) for i in range((n + CHUNK - 1) // CHUNK)]
    parts = ordered_map(
        lambda c: _draw(d, make_rng(seed, (namespace, c[0])), c[1]), chunks)
    return np.concatenate(parts) if parts else np.empty(0)


def sample(d, n, seed=DEFAULT_SEED):
    """``n`` independent draws from ``d`` as a :class:`SampleBatch`."""
    n = int(n)
    if n < 1:
        raise DomainError("sample size must be positive")
    if isinstance(d, GammaBiased):
        return gamma_bias_sample(d.base, d.r, n, seed)
    return SampleBatch(_draw_stream(d, n, seed, _DIRECT), seed, d)


def size_bias(d):
    """Descriptor of ``W^s`` with ``E[W f(W)] = E W * E f(W^s)``.

    Products of independent factors are size biased factor by factor.
    """
    if isinstance(d, Gamma):
        return Gamma(d.r + 1.0)
    if isinstance(d, BetaR1):
        return BetaR1(d.r + 1.0)
    if isinstance(d, ProductGamma):
        return ProductGamma(tuple(v + 1.0 for v in d.r))
    if isinstance(d, ProductBetaVn):
        return ProductBetaVn(tuple(v + 1.0 for v in d.r))
    if isinstance(d, PointMass):
        if not d.c > 0:
            raise DomainError("size bias needs a positive mean")
        return d
    if isinstance(d, Empirical):
        if np.any(d.values < 0):
            raise DomainError("size bias needs non-negative values")
        w = d.probabilities * d.values
        if not w.sum() > 0:
            raise DomainError("size bias needs a positive mean")
        return Empirical(d.values, w)
    raise UnsupportedKindError(f"size bias is not implemented for {type(d).__name__}")


def gamma_bias_sample(d, r, n, seed=DEFAULT_SEED):
    """Draws of ``W^{G(n)} = V_n W^s`` with ``V_n`` independent of ``W^s``."""
    r = _shapes(r)
    check_mean_match(d, r)
    n = int(n)
    ws = _draw_stream(size_bias(d), n, seed, _SIZE_BIASED)
    v = _draw_stream(ProductBetaVn(r), n, seed, _PRODUCT_BETA)
    return SampleBatch(v * ws, seed, GammaBiased(d, r))


# ---------------------------------------------------------------------------
# product beta V_n


def _check_unit(x):
    x = float(x)
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    return x


def _separated(r, gap=SEPARATION):
    s = np.sort(np.asarray(r))
    return s.size == 1 or float(np.min(np.diff(s))) > gap


def vn_density(x, r):
    """Density of ``V_n``, the product of independent ``Beta(r_k, 1)``."""
    x = _check_unit(x)
    r = _shapes(r)
    return math.prod(r) * eval_g_nn_beta(x, r)


def vn_density_distinct(x, r):
    """``prod r_i * sum_k x^(r_k - 1) / prod_{j != k} (r_j - r_k)``; distinct ``r`` only."""
    x = _check_unit(x)
    r = _shapes(r)
    if len(set(r)) != len(r):
        raise DomainError("distinct-parameter formula needs distinct shapes")
    terms = [x ** (rk - 1.0) / math.prod(rj - rk for j, rj in enumerate(r) if j != k)
             for k, rk in enumerate(r)]
    return math.prod(r) * math.fsum(terms)


def vn_cdf(x, r, method="auto"):
    """Distribution function of ``V_n``.

    ``method`` is 'distinct' (closed form for distinct shapes),
    'partial_fractions' (exact integral of the grouped expansion, valid for
    any shapes) or 'auto' (distinct when roots are at least 1e-2 apart).
    """
    x = float(x)
    if x <= 0:
        return 0.0
    if x >= 1:
        return 1.0
    r = _shapes(r)
    if method == "auto":
        method = "distinct" if _separated(r) else "partial_fractions"
    if method == "distinct":
        val = vn_cdf_distinct(x, r)
    elif method == "partial_fractions":
        val = math.prod(r) * integrate_g_nn_beta(x, r)
    else:
        raise ValueError(f"unknown method {method!r}")
    return min(max(val, 0.0), 1.0)


def vn_cdf_distinct(x, r):
    """``sum_k (prod_{j != k} r_j / (r_j - r_k)) x^(r_k)``; distinct ``r`` only."""
    r = _shapes(r)
    if len(set(r)) != len(r):
        raise DomainError("distinct-parameter formula needs distinct shapes")
    terms = [math.prod(rj / (rj - rk) for j, rj in enumerate(r) if j != k) * x ** rk
             for k, rk in enumerate(r)]
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# product gamma and product normal


def pg_density(x, r, config=None):
    """Density of ``PG(r_1..r_n, 1)``, the product of independent ``Gamma(r_k, 1)``."""
    x = float(x)
    if not x > 0:
        raise DomainError("x must be positive")
    r = _shapes(r)
    a = [v - 1.0 for v in r]
    g = eval_g_0n(x, a, config)
    return g * math.exp(-math.fsum(math.lgamma(v) for v in r))


def _log_pdf_bound(d, t):
    # log of the density (or a sharp asymptotic stand-in) used for tail cutoffs
    if isinstance(d, Gamma):
        return (d.r - 1.0) * math.log(t) - t - math.lgamma(d.r)
    if isinstance(d, ProductGamma):
        a = [v - 1.0 for v in d.r]
        return g_0n_log_asymptotic(t, a) - math.fsum(math.lgamma(v) for v in d.r)
    raise UnsupportedKindError(type(d).__name__)


def upper_cutoff(d, log_eps=-60.0):
    """Point beyond which ``t^2 p(t)`` is below ``exp(log_eps)``."""
    if isinstance(d, (BetaR1, ProductBetaVn)):
        return 1.0
    t = max(4.0, 4.0 * mean(d))
    while _log_pdf_bound(d, t) + 2.0 * math.log(t) > log_eps:
        t *= 1.5
    return t


def _rounding(val, terms=1):
    return 4.0 * terms * EPS * abs(val)


def pdf_with_error(d, x):
    """Density of an absolutely continuous descriptor at ``x`` and an
    absolute error estimate (rounding for closed forms, quadrature or
    contour error otherwise)."""
    x = float(x)
    if isinstance(d, Gamma):
        val = math.exp(_log_pdf_bound(d, x)) if x > 0 else 0.0
        return val, _rounding(val)
    if isinstance(d, BetaR1):
        val = d.r * x ** (d.r - 1.0) if 0 < x < 1 else 0.0
        return val, _rounding(val)
    if isinstance(d, ProductGamma):
        if not x > 0:
            return 0.0, 0.0
        g, err = eval_g_0n_with_error(x, [v - 1.0 for v in d.r])
        scale = math.exp(-math.fsum(math.lgamma(v) for v in d.r))
        return g * scale, float(err) * scale + _rounding(g * scale)
    if isinstance(d, ProductBetaVn):
        if not 0 < x < 1:
            return 0.0, 0.0
        g, err = eval_g_nn_beta_with_error(x, d.r)
        return math.prod(d.r) * g, math.prod(d.r) * err
    if isinstance(d, ProductNormal):
        return pn_density_with_error(x, d.n)
    if isinstance(d, GammaBiased):
        if not x > 0:
            return 0.0, 0.0
        return gamma_bias_density_with_error(x, d.base, d.r)
    raise UnsupportedKindError(f"{type(d).__name__} has no density")


def pdf(d, x):
    """Density of an absolutely continuous descriptor at ``x``."""
    return pdf_with_error(d, x)[0]


def cdf_with_error(d, x):
    """Distribution function of ``d`` at ``x`` and an absolute error estimate."""
    x = float(x)
    if isinstance(d, Gamma):
        val = float(special.gammainc(d.r, x)) if x > 0 else 0.0
        return val, _rounding(val, 8)
    if isinstance(d, BetaR1):
        val = min(max(x, 0.0), 1.0) ** d.r
        return val, _rounding(val)
    if isinstance(d, ProductBetaVn):
        return vn_cdf(x, d.r), _rounding(1.0, 4 * len(d.r))
    if isinstance(d, PointMass):
        return (1.0 if x >= d.c else 0.0), 0.0
    if isinstance(d, Empirical):
        return float(d.probabilities[d.values <= x].sum()), _rounding(1.0, d.values.size)
    if isinstance(d, ProductGamma):
        if x <= 0:
            return 0.0, 0.0
        if len(d.r) == 1:
            return cdf_with_error(Gamma(d.r[0]), x)
        # log variable keeps the integrable singularity at 0 harmless; the
        # mass below exp(lo) is at most of order exp(lo * min r)
        lo = max(min(math.log(x), 0.0) - 40.0 / min(d.r), -700.0)
        val, err = integrate.quad(lambda v: pg_density(math.exp(v), d.r) * math.exp(v),
                                  lo, math.log(x), epsabs=1e-13, epsrel=1e-11, limit=200)
        return min(val, 1.0), err
    if isinstance(d, ProductNormal):
        # symmetric, and Z^2 / 2^n ~ PG(1/2, ..., 1/2)
        if x == 0:
            return 0.5, 0.0
        half, err = cdf_with_error(ProductGamma((0.5,) * d.n), x * x / 2.0 ** d.n)
        return 0.5 + math.copysign(0.5 * half, x), 0.5 * err
    if isinstance(d, GammaBiased):
        return gamma_bias_cdf_with_error(x, d.base, d.r)
    raise UnsupportedKindError(f"cdf not available for {type(d).__name__}")


def cdf(d, x):
    """Distribution function of ``d`` at ``x``."""
    return cdf_with_error(d, x)[0]


# ---------------------------------------------------------------------------
# gamma bias transformation: density and distribution function


def beta_kernel(u, r, method="auto"):
    """``G^{n,0}_{n,n}(u | r ; r - 1)`` for ``0 < u < 1`` by root structure.

    'equal' uses ``u^(r-1) log(1/u)^(n-1) / (n-1)!``, 'distinct' the sum
    ``sum_k u^(r_k - 1) / prod_{j != k}(r_j - r_k)``, 'general' the partial
    fraction expansion; 'auto' picks by the shapes.
    """
    r = _shapes(r)
    if method == "auto":
        if len(set(r)) == 1:
            method = "equal"
        elif _separated(r):
            method = "distinct"
        else:
            method = "general"
    if method == "general":
        return eval_g_nn_beta(u, r)
    if method == "distinct":
        return vn_density_distinct(u, r) / math.prod(r)
    if method == "equal":
        if len(set(r)) != 1:
            raise DomainError("equal-parameter kernel needs equal shapes")
        n = len(r)
        u = _check_unit(u)
        return u ** (r[0] - 1.0) * (-math.log(u)) ** (n - 1) / math.factorial(n - 1)
    raise ValueError(f"unknown method {method!r}")


def _expect_above(d, w, h, with_w):
    """``E[W^k h(W) 1(W >= w)]`` with ``k = 1 if with_w else 0``, and an
    absolute error estimate (the standard error for empirical laws)."""
    if isinstance(d, PointMass):
        val = (d.c if with_w else 1.0) * h(d.c) if d.c >= w else 0.0
        return val, _rounding(val, 4)
    if isinstance(d, Empirical):
        keep = d.values >= w
        if not keep.any():
            return 0.0, 0.0
        vals = np.zeros(d.values.size)
        vals[keep] = [h(t) for t in d.values[keep]]
        if with_w:
            vals = vals * d.values
        p = d.probabilities
        val = float(np.dot(p, vals))
        se = math.sqrt(max(float(np.dot(p, (vals - val) ** 2)), 0.0) / d.values.size)
        return val, se
    if isinstance(d, (Gamma, ProductGamma, BetaR1, ProductBetaVn)):
        tmax = upper_cutoff(d)
        if w >= tmax:
            return 0.0, 0.0
        # t = w / u compactifies [w, tmax] onto [w / tmax, 1]
        def integrand(u):
            t = w / u
            val = h(t) * pdf(d, t) * w / (u * u)
            return val * t if with_w else val
        val, err = integrate.quad(integrand, w / tmax, 1.0,
                                  epsabs=1e-14, epsrel=1e-12, limit=400)
        if err > 1e-8 * max(1.0, abs(val)):
            raise ConvergenceError(f"expectation over W: error estimate {err:.2e}")
        return val, err
    raise UnsupportedKindError(f"expectations over {type(d).__name__} are not implemented")


def gamma_bias_density(w, d, r, method="auto"):
    """Density of the ``W``-gamma biased law: ``E[G(w/W | r ; r-1) 1(W >= w)]``.

    ``method`` selects the kernel (see :func:`beta_kernel`).
    """
    return gamma_bias_density_with_error(w, d, r, method)[0]


def gamma_bias_density_with_error(w, d, r, method="auto"):
    """:func:`gamma_bias_density` and its absolute error estimate."""
    w = float(w)
    if not w > 0:
        raise DomainError("w must be positive")
    r = _shapes(r)
    check_mean_match(d, r)

    def h(t):
        return beta_kernel(w / t, r, method) if t > w else 0.0

    return _expect_above(d, w, h, with_w=False)


def gamma_bias_cdf(w, d, r, method="auto"):
    """Distribution function of the ``W``-gamma biased law; see
    :func:`gamma_bias_cdf_with_error`."""
    return gamma_bias_cdf_with_error(w, d, r, method)[0]


def gamma_bias_cdf_with_error(w, d, r, method="auto"):
    """Distribution function of the ``W``-gamma biased law and an absolute
    error estimate.

    ``F(w) = 1 - (prod r)^-1 E[W (1 - F_V(w/W)) 1(W >= w)]``.

    ``method``: 'vn' uses :func:`vn_cdf`; 'distinct' the distinct-shape
    closed form of ``F_V``; 'incomplete_gamma' the equal-shape form
    ``1 - F_V(w/W) = gamma(n, r log(W/w)) / (n-1)!``; 'auto' picks the
    incomplete gamma form for equal shapes and 'vn' otherwise.
    """
    w = float(w)
    if w <= 0:
        return 0.0, 0.0
    r = _shapes(r)
    check_mean_match(d, r)
    n = len(r)
    if method == "auto":
        method = "incomplete_gamma" if len(set(r)) == 1 else "vn"
    if method == "vn":
        surv = lambda v: 1.0 - vn_cdf(v, r)
    elif method == "distinct":
        surv = lambda v: 1.0 - vn_cdf_distinct(v, r)
    elif method == "incomplete_gamma":
        if len(set(r)) != 1:
            raise DomainError("incomplete-gamma form needs equal shapes")
        scale = float(math.factorial(n - 1))
        surv = lambda v: lower_incomplete_gamma(n, -r[0] * math.log(v)) / scale
    else:
        raise ValueError(f"unknown method {method!r}")

    def h(t):
        return surv(w / t) if t > w else 0.0

    e, err = _expect_above(d, w, h, with_w=True)
    val = 1.0 - e / math.prod(r)
    return min(max(val, 0.0), 1.0), err / math.prod(r)
