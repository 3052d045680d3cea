"""Operator algebra on test functions of the form sum c x^p (log x)^q e^(-beta x).

``T_r f = x f' + r f`` and its iterate ``B_{r_1..r_n} = T_{r_1} ... T_{r_n}``
act exactly on :class:`TermBasisFunction`. The inverse ``H_r f(x) =
x^(-r) integral_0^x t^(r-1) f(t) dt`` is exact on terms without decay and
numerical otherwise.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError
from .meijer_kernel import eval_g_nn_beta
from .rng import make_rng

__all__ = [
    "Term",
    "TermBasisFunction",
    "apply_T",
    "apply_B",
    "apply_H",
    "apply_H_iter",
    "h_symbolic",
    "h_iter_symbolic",
    "h_iter_monte_carlo",
    "random_term_function",
]


@dataclass(frozen=True, order=True)
class Term:
    """``coef * x**power * log(x)**log_power * exp(-decay * x)``."""

    power: float
    log_power: int
    decay: float
    coef: float

    def __post_init__(self):
        if self.log_power < 0 or int(self.log_power) != self.log_power:
            raise DomainError("log_power must be a non-negative integer")
        if self.decay < 0:
            raise DomainError("decay must be non-negative")


class TermBasisFunction:
    """Finite sum of :class:`Term` objects, kept in canonical form.

    Terms with the same ``(power, log_power, decay)`` are merged and zero
    coefficients dropped, so two equal functions compare equal.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        acc = {}
        for t in terms:
            if not isinstance(t, Term):
                t = Term(*t) if len(t) == 4 and not isinstance(t, dict) else Term(**t)
            key = (float(t.power), int(t.log_power), float(t.decay))
            acc[key] = acc.get(key, 0.0) + float(t.coef)
        self.terms = tuple(
            Term(p, q, b, c) for (p, q, b), c in sorted(acc.items()) if c != 0.0)

    @classmethod
    def monomial(cls, power, coef=1.0, log_power=0, decay=0.0):
        return cls([Term(power, log_power, decay, coef)])

    @classmethod
    def constant(cls, value=1.0):
        return cls.monomial(0.0, value)

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if np.any(x <= 0):
            raise DomainError("term-basis functions are defined on x > 0")
        logx = np.log(x)
        out = np.zeros_like(x)
        for t in self.terms:
            val = t.coef * np.exp(t.power * logx - t.decay * x)
            if t.log_power:
                val = val * logx ** t.log_power
            out = out + val
        return out if out.ndim else float(out)

    def derivative(self):
        out = []
        for t in self.terms:
            out.append(Term(t.power - 1, t.log_power, t.decay, t.coef * t.power))
            if t.log_power:
                out.append(Term(t.power - 1, t.log_power - 1, t.decay, t.coef * t.log_power))
            if t.decay:
                out.append(Term(t.power, t.log_power, t.decay, -t.coef * t.decay))
        return TermBasisFunction(out)

    @property
    def has_decay(self):
        return any(t.decay for t in self.terms)

    def split_decay(self):
        """Return ``(part without decay, part with decay)``."""
        return (TermBasisFunction(t for t in self.terms if not t.decay),
                TermBasisFunction(t for t in self.terms if t.decay))

    def __add__(self, other):
        return TermBasisFunction(self.terms + other.terms)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, k):
        return TermBasisFunction(Term(t.power, t.log_power, t.decay, k * t.coef)
                                 for t in self.terms)

    def __eq__(self, other):
        return isinstance(other, TermBasisFunction) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        if not self.terms:
            return "TermBasisFunction(0)"
        parts = []
        for t in self.terms:
            s = f"{t.coef:+.6g}*x^{t.power:g}"
            if t.log_power:
                s += f"*log(x)^{t.log_power}"
            if t.decay:
                s += f"*exp(-{t.decay:g}x)"
            parts.append(s)
        return "TermBasisFunction(" + " ".join(parts) + ")"


def _shapes(r):
    r = np.atleast_1d(np.asarray(r, dtype=np.float64))
    if r.ndim != 1 or r.size == 0 or np.any(~(r > 0)):
        raise DomainError(f"shape vector must hold positive reals, got {r.tolist()}")
    return r


def apply_T(r, f):
    """``T_r f(x) = x f'(x) + r f(x)``, exactly."""
    out = []
    for t in f.terms:
        out.append(Term(t.power, t.log_power, t.decay, (t.power + r) * t.coef))
        if t.log_power:
            out.append(Term(t.power, t.log_power - 1, t.decay, t.log_power * t.coef))
        if t.decay:
            out.append(Term(t.power + 1, t.log_power, t.decay, -t.decay * t.coef))
    return TermBasisFunction(out)


def apply_B(r, f):
    """``B_{r_1..r_n} f = T_{r_1}(T_{r_2}(... T_{r_n} f))``."""
    for rk in _shapes(r)[::-1]:
        f = apply_T(float(rk), f)
    return f


def h_symbolic(r, f):
    """Exact ``H_r f`` for ``f`` without exponential decay.

    Uses ``x^-r integral_0^x t^(r+p-1) log(t)^q dt =
    sum_j q!/(q-j)! (-1)^j (r+p)^-(j+1) x^p log(x)^(q-j)``, which needs
    ``r + p > 0`` for every term.
    """
    if f.has_decay:
        raise DomainError("symbolic H needs terms without exponential decay")
    out = []
    for t in f.terms:
        k = r + t.power
        if not k > 0:
            raise DomainError(
                f"t^{r - 1} f(t) is not integrable at 0 (power {t.power}, r {r})")
        q = t.log_power
        for j in range(q + 1):
            c = math.factorial(q) / math.factorial(q - j) * (-1) ** j / k ** (j + 1)
            out.append(Term(t.power, q - j, 0.0, t.coef * c))
    return TermBasisFunction(out)


def h_iter_symbolic(r, f):
    """Exact ``H_{r_1}(... H_{r_n} f)`` for ``f`` without decay."""
    for rk in _shapes(r)[::-1]:
        f = h_symbolic(float(rk), f)
    return f


def _quad01(g, what, eps=1e-13):
    # the error estimate is checked here, so QUADPACK's roundoff warnings
    # (common when eps is near machine precision) are redundant
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(g, 0.0, 1.0, epsabs=eps, epsrel=eps, limit=400)
    if err > 1e-10 * (1.0 + abs(val)):
        raise ConvergenceError(f"{what}: quadrature error estimate {err:.2e}")
    return val


def _h_numeric(r, f, x, eps=1e-13):
    # t = x u^(1/r) turns t^(r-1) dt into x^r du / r
    # QUADPACK never evaluates the endpoints, so u > 0 here
    inv = 1.0 / r
    return _quad01(lambda u: float(f(x * u ** inv)), "H_r", eps) / r


def apply_H(r, f, x):
    """``H_r f(x) = x^(-r) integral_0^x t^(r-1) f(t) dt``.

    ``f`` is a :class:`TermBasisFunction` (decay-free terms are handled
    exactly) or any callable on ``(0, x]``.
    """
    r = float(r)
    x = float(x)
    if not r > 0:
        raise DomainError("r must be positive")
    if not x > 0:
        raise DomainError("x must be positive")
    if isinstance(f, TermBasisFunction):
        plain, decaying = f.split_decay()
        total = h_symbolic(r, plain)(x) if plain.terms else 0.0
        if decaying.terms:
            total += _h_numeric(r, decaying, x)
        return float(total)
    return _h_numeric(r, f, x)


def _h_nested(r, f, x):
    if r.size == 1:
        return apply_H(r[0], f, x)
    inner = lambda t: _h_nested(r[1:], f, t)
    # outer levels integrate values that carry the inner rounding noise
    return _h_numeric(float(r[0]), inner, x, eps=1e-11)


def apply_H_iter(r, f, x, method="auto"):
    """``H_{r_1..r_n} f(x) = H_{r_1}(... H_{r_n} f)(x)``.

    Methods
    -------
    'symbolic'
        Exact chain, ``f`` a decay-free :class:`TermBasisFunction`.
    'nested'
        Nested one-dimensional quadratures, inner values on demand.
    'kernel'
        The single integral ``integral_0^1 f(x v) G(v) dv`` against the
        product-beta kernel ``G = G^{n,0}_{n,n}(. | r ; r-1)``.
    'auto'
        'symbolic' when possible, otherwise 'kernel' (or plain ``H_r``
        for ``n == 1``).
    """
    r = _shapes(r)
    x = float(x)
    if not x > 0:
        raise DomainError("x must be positive")
    if method == "auto":
        if isinstance(f, TermBasisFunction) and not f.has_decay:
            method = "symbolic"
        elif r.size == 1:
            return apply_H(r[0], f, x)
        else:
            method = "kernel"
    if method == "symbolic":
        return float(h_iter_symbolic(r, f)(x))
    if method == "nested":
        return _h_nested(r, f, x)
    if method == "kernel":
        rr = tuple(r.tolist())
        # v = w^(1/m), m = min r, absorbs the v^(m-1) singularity of the kernel
        m = float(r.min())
        inv = 1.0 / m

        def g(w):
            v = w ** inv
            if not 0 < v < 1:
                return 0.0
            return float(f(x * v)) * eval_g_nn_beta(v, rr) * v / (m * w)

        return _quad01(g, "H kernel form")
    raise ValueError(f"unknown method {method!r}")


def h_iter_monte_carlo(r, f, x, n_samples=10**6, seed=0):
    """Monte Carlo ``(prod r)^-1 E f(x V)`` with ``V`` a product of Beta(r_k, 1).

    Returns ``(estimate, standard_error)``.
    """
    r = _shapes(r)
    rng = make_rng(seed, stream=7)
    v = np.ones(int(n_samples))
    for rk in r:
        v *= rng.random(int(n_samples)) ** (1.0 / rk)
    vals = np.asarray(f(x * v), dtype=np.float64) / np.prod(r)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))


def random_term_function(rng, n_terms=3, decay=False, max_power=3.0, max_log=2):
    """Random :class:`TermBasisFunction` with non-negative powers.

    Non-negative powers keep ``H_r`` well defined for every ``r > 0``.
    """
    terms = []
    for _ in range(n_terms):
        p = float(rng.uniform(0.0, max_power))
        q = int(rng.integers(0, max_log + 1))
        b = float(rng.uniform(0.2, 2.0)) if decay and rng.random() < 0.5 else 0.0
        terms.append(Term(p, q, b, float(rng.normal())))
    return TermBasisFunction(terms)
