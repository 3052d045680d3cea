"""Gamma bias transformations, product gamma laws and the Meijer G kernels
that describe them.

Submodules
----------
specfun
    Real and complex log-gamma, incomplete gamma, factorials.
meijer_kernel
    ``G^{n,0}_{0,n}`` by Mellin-Barnes quadrature and ``G^{n,0}_{n,n}`` by
    partial fractions.
operators
    ``T_r``, ``B_r``, ``H_r`` on a closed term basis and numerically.
distributions
    Descriptors, samplers, densities and CDFs.
verifier
    Numerical checks of the integral identities, with reports.
cli
    The ``gbias`` command.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import (
    ConvergenceError,
    DomainError,
    GbiasError,
    MeanMismatchError,
    PoleError,
    UnsupportedKindError,
)
from .meijer_kernel import ContourConfig, eval_g_0n, eval_g_nn_beta, pn_density

__all__ = [
    "__version__",
    "BACKEND",
    "ContourConfig",
    "ConvergenceError",
    "DomainError",
    "GbiasError",
    "MeanMismatchError",
    "PoleError",
    "UnsupportedKindError",
    "eval_g_0n",
    "eval_g_nn_beta",
    "pn_density",
]
