"""Pure numpy implementations of the hot kernels.

These mirror the compiled routines in ``_core.pyx`` one for one and are
used when the extension is not built (or when ``GBIAS_PURE_PYTHON=1``).
"""
import numpy as np

# Godfrey's coefficients, g = 607/128.
LANCZOS_G = 607.0 / 128.0
LANCZOS_COEF = np.array([
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
])
HALF_LOG_2PI = 0.91893853320467274178


def _lanczos(z):
    # ln Gamma(z) for Re z >= 0.5
    w = z - 1.0
    acc = np.full_like(w, LANCZOS_COEF[0])
    for i in range(1, LANCZOS_COEF.size):
        acc = acc + LANCZOS_COEF[i] / (w + i)
    t = w + LANCZOS_G + 0.5
    return HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(acc)


def loggamma_array(z):
    """Principal branch of ln Gamma for an array of complex arguments.

    Arguments with ``Re z < 0.5`` are shifted right with the recurrence
    ``lnG(z) = lnG(z + N) - sum(log(z + k))``, which keeps the principal
    branch off the negative real axis. Poles are not checked here.
    """
    z = np.asarray(z, dtype=np.complex128)
    shift = np.maximum(0, np.ceil(0.5 - z.real)).astype(np.int64)
    nmax = int(shift.max()) if shift.size else 0
    if nmax == 0:
        return _lanczos(z)
    corr = np.zeros_like(z)
    for k in range(nmax):
        m = shift > k
        corr[m] += np.log(z[m] + k)
    return _lanczos(z + shift) - corr


def loggamma_scalar(z):
    return complex(loggamma_array(np.array([z]))[0])


def mb_log_integrand(logx, a, c, tau):
    """Complex log of ``x**(-s) * prod(Gamma(s + a_j))`` at ``s = c + i tau``."""
    tau = np.asarray(tau, dtype=np.float64)
    s = c + 1j * tau
    out = -s * logx
    for aj in np.asarray(a, dtype=np.float64):
        out = out + loggamma_array(s + aj)
    return out


def mb_sum(logx, a, c, tau0, h, count, shift=0.0):
    """Sum of ``Re exp(log integrand - shift)`` at ``tau0 + k h``, k < count."""
    tau = tau0 + h * np.arange(count, dtype=np.float64)
    return float(np.sum(np.exp(mb_log_integrand(logx, a, c, tau) - shift).real))
