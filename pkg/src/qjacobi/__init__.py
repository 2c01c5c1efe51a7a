"""Hahn-Exton q-Bessel functions, a q-Macdonald function, and the Jacobi
operators and orthogonal polynomials attached to them.

Submodules
----------
qcore       q-Pochhammer symbols, basic hypergeometric series, Jackson integrals
qbessel     j_nu and its companions, zeros, limit ratios
qtransform  q-Bessel Fourier transform and the q-Macdonald function K_nu
spectral    Jacobi matrices, three-term recurrences, Gauss rules
qpoly       the orthogonal polynomials P_n, their measure and related families
verify      named numerical verification suites
cli         command-line entry point
"""

from . import qbessel, qcore, qpoly, qtransform, spectral
from .errors import DomainError, QJacobiError
from .qbessel import bessel_zeros, gamma_nu, i_nu, j_nu, pi_nu
from .qcore import QContext
from .qpoly import measure, pn_eval, stieltjes_closed, stieltjes_limit
from .qtransform import fourier, kv, macdonald
from .spectral import build_jacobi, truncated_spectrum

__version__ = "0.1.0"

__all__ = [
    "QContext",
    "QJacobiError",
    "DomainError",
    "j_nu",
    "i_nu",
    "gamma_nu",
    "pi_nu",
    "bessel_zeros",
    "fourier",
    "macdonald",
    "kv",
    "build_jacobi",
    "truncated_spectrum",
    "pn_eval",
    "stieltjes_limit",
    "stieltjes_closed",
    "measure",
    "qcore",
    "qbessel",
    "qtransform",
    "spectral",
    "qpoly",
]
