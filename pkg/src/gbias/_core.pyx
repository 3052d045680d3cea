# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: complex log-gamma and the Mellin-Barnes trapezoid sum.

Same signatures as ``gbias._fallback``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, ceil, cos, exp, hypot, log

cnp.import_array()

cdef double LANCZOS_G = 607.0 / 128.0
cdef double HALF_LOG_2PI = 0.91893853320467274178
cdef double[15] COEF
COEF[:] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
]


cdef inline void _lanczos(double zr, double zi, double* outr, double* outi) nogil:
    # ln Gamma(z) for Re z >= 0.5, in real arithmetic
    cdef double wr = zr - 1.0
    cdef double ar = COEF[0]
    cdef double ai = 0.0
    cdef double dr, d, tr, lt, th, lacc, thacc
    cdef int i
    for i in range(1, 15):
        dr = wr + i
        d = COEF[i] / (dr * dr + zi * zi)
        ar += d * dr
        ai -= d * zi
    tr = wr + LANCZOS_G + 0.5
    lt = log(hypot(tr, zi))
    th = atan2(zi, tr)
    lacc = log(hypot(ar, ai))
    thacc = atan2(ai, ar)
    outr[0] = HALF_LOG_2PI + (wr + 0.5) * lt - zi * th - tr + lacc
    outi[0] = (wr + 0.5) * th + zi * lt - zi + thacc


cdef inline void _loggamma(double zr, double zi, double* outr, double* outi) nogil:
    cdef int n = 0
    cdef int k
    cdef double cr = 0.0
    cdef double ci = 0.0
    if zr < 0.5:
        # shift right with the recurrence; keeps the principal branch
        n = <int>ceil(0.5 - zr)
        for k in range(n):
            cr += log(hypot(zr + k, zi))
            ci += atan2(zi, zr + k)
    _lanczos(zr + n, zi, outr, outi)
    outr[0] -= cr
    outi[0] -= ci


cdef double complex c_loggamma(double complex z) nogil:
    cdef double r, i
    _loggamma(z.real, z.imag, &r, &i)
    return r + 1j * i


def loggamma_scalar(z):
    return complex(c_loggamma(complex(z)))


def loggamma_array(z):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] flat = np.ascontiguousarray(
        np.asarray(z, dtype=np.complex128).ravel())
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty_like(flat)
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        for i in range(n):
            out[i] = c_loggamma(flat[i])
    return out.reshape(np.shape(z))


def mb_log_integrand(double logx, a, double c, tau):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tv = np.ascontiguousarray(
        np.atleast_1d(np.asarray(tau, dtype=np.float64)))
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(tv.shape[0], dtype=np.complex128)
    cdef Py_ssize_t i, j, m = av.shape[0], n = tv.shape[0]
    cdef double accr, acci, gr, gi
    with nogil:
        for i in range(n):
            accr = -c * logx
            acci = -tv[i] * logx
            for j in range(m):
                _loggamma(c + av[j], tv[i], &gr, &gi)
                accr += gr
                acci += gi
            out[i] = accr + 1j * acci
    if np.ndim(tau) == 0:
        return complex(out[0])
    return out


def mb_sum(double logx, a, double c, double tau0, double h, Py_ssize_t count,
           double shift=0.0):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t k, j, m = av.shape[0]
    cdef double total = 0.0
    cdef double tau, accr, acci, gr, gi
    with nogil:
        for k in range(count):
            tau = tau0 + k * h
            accr = -c * logx
            acci = -tau * logx
            for j in range(m):
                _loggamma(c + av[j], tau, &gr, &gi)
                accr += gr
                acci += gi
            total += exp(accr - shift) * cos(acci)
    return total
