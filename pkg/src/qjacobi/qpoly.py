"""The polynomial family attached to the lattice q-Bessel operator.

``P_n`` and ``Q_n`` solve

    q**(2n+nu+1) P_{n+1} - q**(2n) (1 + q**(2nu)) P_n + q**(2n+nu-1) P_{n-1} = lam P_n

with ``(P_{-1}, P_0) = (0, 1)`` and ``(Q_{-1}, Q_0) = (-1, 0)``.  The module
provides three independent representations of ``P_n``, the identities that
tie them to the q-Bessel family, the generating function, the Stieltjes
transform of the orthogonality measure and the measure itself.

Conventions
-----------
The coefficient multiplying ``P_{-1}`` in the ``n = 0`` equation is
``q**(nu-1)`` (the continuation of ``a_n``).  It is irrelevant for ``P_n``
but scales ``Q_n``: with it ``Q_n`` is ``q**(nu-1)`` times the second-kind
polynomial of the standard normalization ``a_{-1} = 1``.  The q-Bessel
identities are stated for the former, the Stieltjes transform for the
latter.  Functions that depend on the choice take an ``a_prev`` argument.

Several closed forms are offered in two versions: ``form="corrected"``
(the default, validated against independent oracles) and
``form="printed"``, kept so that the discrepancy can be measured.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import qbessel as qb
from . import qtransform as qt
from .errors import (
    BracketNotFound,
    DomainError,
    NoConvergence,
    OutOfRegion,
    PoleError,
    RecurrenceOverflow,
)
from .qcore import QContext, is_complex, qbinom, qpoch_finite, qpoch_inf, rphis
from .spectral import build_jacobi, solve_recurrence, truncated_spectrum

__all__ = [
    "PolyPair",
    "poly_pair",
    "pn_eval",
    "pn_coefficient",
    "pn_explicit",
    "pn_from_solutions",
    "GenFunEval",
    "genfun",
    "genfun_closed",
    "IdentityResult",
    "identity_check",
    "stieltjes_closed",
    "stieltjes_limit",
    "Provenance",
    "SpectralMeasure",
    "measure",
    "al_salam_ismail",
    "al_salam_ismail_relation",
    "lommel_r",
    "lommel_dictionary",
]

EXPLICIT_DPS = 50
COEFF_CAP = 16
FLOOR = 1e-300


def _forms(form: str) -> str:
    if form not in ("corrected", "printed"):
        raise DomainError(f"form must be 'corrected' or 'printed', got {form!r}")
    return form


def _default_prev(ctx: QContext):
    return ctx.qw ** (ctx.nuw - 1)


def _out(v, ctx: QContext):
    """Convert a high precision value back to the caller's arithmetic."""
    if ctx.arith.is_mp:
        return ctx.arith.num(v)
    return complex(v) if is_complex(v) else float(v)


def _coeffs(ctx: QContext, n: int, a_prev=None, potential="zero"):
    J = build_jacobi(potential, ctx, max(n, 2))
    return J.with_a_prev(_default_prev(ctx) if a_prev is None else a_prev)


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PolyPair:
    """``P_n`` and ``Q_n`` up to degree ``n_max``.

    ``coeffs`` holds monomial coefficients of ``P_0 .. P_n`` (row ``n``,
    column ``m`` is the coefficient of ``lam**m``) for ``n <= COEFF_CAP``.
    Beyond that the recurrence is only evaluated, never expanded.
    """

    n_max: int
    ctx: QContext
    a_prev: object
    coeffs: np.ndarray | None = field(default=None, repr=False)

    def eval(self, lam) -> tuple[list, list]:
        J = _coeffs(self.ctx, self.n_max, self.a_prev)
        P = solve_recurrence(J, lam, self.n_max, "first_kind")
        Q = solve_recurrence(J, lam, self.n_max, "second_kind")
        return P, Q


def poly_pair(ctx: QContext, n_max: int, a_prev=None) -> PolyPair:
    """Build a :class:`PolyPair`; monomial coefficients come from the recurrence."""
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    coeffs = None
    cap = min(n_max, COEFF_CAP)
    J = _coeffs(ctx, max(cap, 2))
    a = [float(v) for v in J.a]
    b = [float(v) for v in J.b]
    C = np.zeros((cap + 1, cap + 1))
    C[0, 0] = 1.0
    prev = np.zeros(cap + 1)
    for n in range(cap):
        a_nm1 = float(J.a_prev) if n == 0 else a[n - 1]
        nxt = np.zeros(cap + 1)
        nxt[1:] += C[n, :-1]
        nxt -= b[n] * C[n]
        nxt -= a_nm1 * prev
        prev = C[n].copy()
        C[n + 1] = nxt / a[n]
    coeffs = C
    return PolyPair(n_max, ctx, _default_prev(ctx) if a_prev is None else a_prev, coeffs)


def pn_eval(lam, n: int, ctx: QContext, a_prev=None, scaled: bool = False):
    """``(P_n(lam), Q_n(lam))`` by forward recurrence.

    Parameters
    ----------
    a_prev : scalar, optional
        Coefficient of ``P_{-1}`` at ``n = 0``; default ``q**(nu-1)``.
    scaled : bool
        Return ``q**(n(nu+1))`` times the values, computed without forming
        the unscaled ones.

    Examples
    --------
    >>> from qjacobi.qcore import QContext
    >>> P, Q = pn_eval(0.0, 1, QContext(q=0.5, nu=0.5))
    >>> round(P, 4), Q
    (4.2426, 4.0)
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    J = _coeffs(ctx, n, a_prev)
    s = ctx.qw ** (ctx.nuw + 1) if scaled else None
    P = solve_recurrence(J, lam, n, "first_kind", scaled_by=s)
    Q = solve_recurrence(J, lam, n, "second_kind", scaled_by=s)
    return P[n], Q[n]


def pn_from_solutions(f, h, n: int, lam, ctx: QContext):
    """``P_n(lam)`` from two independent solutions of ``Delta y = lam y``.

    ``q**(-n(nu+1)) [f(q**-n) h(q) - h(q**-n) f(q)] / [f(1) h(q) - h(1) f(q)]``.
    """
    q = ctx.qw
    den = f(ctx.qpow(0)) * h(q) - h(ctx.qpow(0)) * f(q)
    if den == 0:
        raise DomainError("solutions are not independent at the lattice base point")
    num = f(ctx.qpow(-n)) * h(q) - h(ctx.qpow(-n)) * f(q)
    return q ** (-n * (ctx.nuw + 1)) * num / den


# --------------------------------------------------------------------------
# explicit representations
# --------------------------------------------------------------------------


def _hp(ctx: QContext) -> QContext:
    return ctx.elevated(max(EXPLICIT_DPS, ctx.dps or 0))


def _a_mn(m: int, n: int, hp: QContext, form: str):
    q = hp.qw
    nu = hp.nuw
    q2 = q * q
    pre = q ** (m * (m + 1) - 2 * m * nu) / (
        qpoch_finite(q2, q2, m) * qpoch_finite(q ** (2 - 2 * nu), q2, m)
    )
    nums = [q ** (-2 * m), q ** (2 * nu - 2 * m)]
    dens = [q ** (2 * nu + 2)]
    if form == "corrected":
        z1 = hp.qpow(2 * (m - n))
        f2 = q ** (2 * n * (nu - m))
        z2 = hp.qpow(2 * (m + n + 2))
    else:
        z1 = q ** (2 * (nu - n))
        f2 = q ** (2 * n * (m + nu))
        z2 = q ** (4 + 2 * (nu - n))
    t1 = q ** (2 * (m - nu)) * rphis(nums, dens, q2, z1, hp, terminate=m).value
    t2 = f2 * rphis(nums, dens, q2, z2, hp, terminate=m).value
    return pre * (t1 - t2)


def pn_coefficient(m: int, n: int, ctx: QContext, form: str = "corrected"):
    """Coefficient of ``lam**m`` in ``P_n(lam)`` from the terminating 2phi1 pair.

    The value is ``q**(-n(nu+1)) / (q**(-2nu) - 1) * a_{m,n}``.  Evaluated
    at ``EXPLICIT_DPS`` digits because the two terms cancel heavily.

    Examples
    --------
    >>> from qjacobi.qcore import QContext
    >>> pn_coefficient(0, 0, QContext())
    1.0
    >>> pn_coefficient(3, 2, QContext())
    0.0
    """
    _forms(form)
    if m < 0 or n < 0:
        raise DomainError("m and n must be non-negative")
    if m > n:
        return _out(ctx.arith.zero(), ctx) if ctx.arith.is_mp else 0.0
    hp = _hp(ctx)
    q = hp.qw
    nu = hp.nuw
    val = q ** (-n * (nu + 1)) / (q ** (-2 * nu) - 1) * _a_mn(m, n, hp, form)
    return _out(val, ctx)


def pn_explicit(n: int, x, ctx: QContext, form: str = "corrected"):
    """``P_n(x)`` from the finite double sum with q-binomials.

    ``q**(-n(1+nu)) sum_m q**e(m) [n m]_{q^2} 2phi1(q**(2m+2), q**(2(m-n)); q**(-2n); q**2, q**(2(nu-m))) x**m``
    with ``e(m) = m(m+1) - 2mn`` for the corrected form and ``m(m-1)`` for
    the printed one.
    """
    _forms(form)
    if n < 0:
        raise DomainError("n must be non-negative")
    hp = _hp(ctx)
    q = hp.qw
    nu = hp.nuw
    q2 = q * q
    xh = hp.arith.num(x)
    total = hp.arith.zero()
    for m in range(n + 1):
        e = m * (m + 1) - 2 * m * n if form == "corrected" else m * (m - 1)
        phi = rphis(
            [hp.qpow(2 * m + 2), hp.qpow(2 * (m - n))],
            [hp.qpow(-2 * n)],
            q2,
            q ** (2 * (nu - m)),
            hp,
            terminate=n - m,
        ).value
        total = total + hp.qpow(e) * qbinom(n, m, q2) * phi * xh**m
    return _out(q ** (-n * (1 + nu)) * total, ctx)


# --------------------------------------------------------------------------
# generating function
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GenFunEval:
    """Closed form and partial sum of ``sum_n t**n P_n(x)``.

    ``series_converges`` is ``False`` for ``x != 0``: ``P_n(x)`` then grows
    like ``q**(-n**2)`` and the power series in ``t`` has radius zero, so
    the partial sum is reported but is not an approximation of the closed
    form.
    """

    x: complex
    t: complex
    closed_value: complex
    series_value: complex
    terms: int
    series_converges: bool
    form: str = "corrected"


def _genfun_guard(t, ctx: QContext, x):
    q = float(ctx.q)
    nu = float(ctx.nu)
    at = abs(complex(t))
    if not at < q ** (1 + nu):
        raise OutOfRegion(f"|t| = {at:g} violates |t| < q**(1+nu) = {q ** (1 + nu):g}")
    if at == 0:
        return
    poles = [q ** (1 - nu), q ** (1 + nu)]
    if complex(x) != 0:
        # poles q**(2j+1 +- nu) accumulate at t = 0
        jmax = int(math.log(at / 8) / (2 * math.log(q))) + 2 if at > 0 else 0
        for j in range(1, max(jmax, 1) + 1):
            poles += [q ** (2 * j + 1 - nu), q ** (2 * j + 1 + nu)]
    for p in poles:
        if abs(complex(t) - p) < 1e-9 * p:
            raise PoleError(f"t = {complex(t)} is a pole of the generating function")


def genfun_closed(x, t, ctx: QContext, form: str = "corrected"):
    """Closed form of the generating function.

    corrected::

        sum_m (x t)**m q**(-m**2 - m nu)
              / ((q**(nu-1-2m) t; q2)_{m+1} (q**(-nu-1-2m) t; q2)_{m+1})

    printed::

        sum_m (x t)**m q**(m(m-1) - (1+nu) m)
              / ((q**(nu-1) t; q2)_{m+1} (q**(-(1+nu)) t; q2)_{m+1})
    """
    _forms(form)
    ar = ctx.arith
    q = ctx.qw
    nu = ctx.nuw
    q2 = q * q
    x = ar.num(x)
    t = ar.num(t)
    xt = x * t
    terms = []
    m = 0
    small = 0
    while True:
        if form == "corrected":
            den = qpoch_finite(q ** (nu - 1 - 2 * m) * t, q2, m + 1) * qpoch_finite(
                q ** (-nu - 1 - 2 * m) * t, q2, m + 1
            )
            c = q ** (-m * m - m * nu)
        else:
            den = qpoch_finite(q ** (nu - 1) * t, q2, m + 1) * qpoch_finite(q ** (-(1 + nu)) * t, q2, m + 1)
            c = q ** (m * (m - 1) - (1 + nu) * m)
        if den == 0:
            raise PoleError("generating function denominator vanishes")
        term = c * xt**m / den
        terms.append(term)
        if xt == 0:
            break
        s = abs(ar.fsum(terms))
        small = small + 1 if abs(term) <= ctx.series_tol * s else 0
        if small >= 3 and m >= 4:
            break
        m += 1
        if m >= ctx.max_terms:
            raise NoConvergence("generating function series did not settle")
    return ar.fsum(terms)


def genfun(x, t, N: int, ctx: QContext, form: str = "corrected") -> GenFunEval:
    """Generating function ``G(x, t) = sum_n t**n P_n(x)``.

    Raises
    ------
    OutOfRegion
        If ``|t| >= q**(1+nu)``.
    PoleError
        If ``t`` sits on a pole ``q**(2j+1 +- nu)``.
    """
    _genfun_guard(t, ctx, x)
    closed = genfun_closed(x, t, ctx, form)
    J = _coeffs(ctx, N)
    try:
        P = solve_recurrence(J, ctx.arith.num(x), N, "first_kind")
        series = ctx.arith.fsum([ctx.arith.num(t) ** n * P[n] for n in range(N + 1)])
    except (RecurrenceOverflow, OverflowError):
        hp = ctx.elevated(30)
        Jh = _coeffs(hp, N)
        P = solve_recurrence(Jh, hp.arith.num(x), N, "first_kind")
        # kept in high precision: the partial sums leave the double range
        series = hp.arith.fsum([hp.arith.num(t) ** n * P[n] for n in range(N + 1)])
    return GenFunEval(x, t, closed, series, N + 1, complex(x) == 0, form)


def genfun_functional_residual(x, t, ctx: QContext, form: str = "corrected") -> float:
    """``|G(q**2 t)(1-q**(1+nu)t)(1-q**(1-nu)t) - 1 - q**(1-nu) x t G(t)|`` relative."""
    q = ctx.qw
    nu = ctx.nuw
    G1 = genfun_closed(x, q * q * t, ctx, form)
    G0 = genfun_closed(x, t, ctx, form)
    lhs = G1 * (1 - q ** (1 + nu) * t) * (1 - q ** (1 - nu) * t)
    rhs = 1 + q ** (1 - nu) * x * t * G0
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), FLOOR))


# --------------------------------------------------------------------------
# identities linking P_n, Q_n and the q-Bessel family
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityResult:
    which: str
    lam: float
    n: int
    lhs: object
    rhs: object
    residual: float
    dps: int | None


def _recessive_dps(n: int, ctx: QContext) -> int:
    digits = 2 * n * (n + 1) * math.log10(1 / float(ctx.q))
    return max(30, 30 + int(math.ceil(digits)))


def identity_check(which: str, lam, n: int, ctx: QContext, dps: int | None = None,
                   k_route: str = "auto") -> IdentityResult:
    """Relative residual of one of the identities a) to f).

    a) ``j(q**-n lam) = q**(n(nu+1)) [j(lam) P_n(-lam**2) - q**(nu+1) j(q lam) Q_n(-lam**2)]``
    b) same with ``gamma``;  c) with ``I`` and ``+lam**2``;  d) with ``K``.
    e) ``P_n(-lam**2) = q**(-n(nu+1)) lam**(2nu) / (q**(-2nu)-1) [j(q**-n lam) gamma(q lam) - gamma(q**-n lam) j(q lam)]``
    f) same for ``P_n(lam**2)`` with ``I, K`` and an extra ``1/alpha``.

    ``Q_n`` uses ``a_prev = q**(nu-1)``.  For a) and d) at lattice ``lam``
    the left side is recessive and the right side cancels to about
    ``q**(2n(n+1))`` relative, so the check runs at elevated precision
    (``dps`` chosen automatically unless given).

    Examples
    --------
    >>> from qjacobi.qcore import QContext
    >>> identity_check("a", 0.5, 0, QContext()).residual
    0.0
    """
    if which not in "abcdef" or len(which) != 1:
        raise DomainError(f"unknown identity {which!r}")
    if n < 0:
        raise DomainError("n must be non-negative")
    if is_complex(lam) or not lam > 0:
        raise DomainError("lam must be a positive real")
    use_dps = dps
    if use_dps is None and which in "ad" and n > 0:
        use_dps = _recessive_dps(n, ctx)
    wctx = ctx.elevated(use_dps) if use_dps else ctx
    ar = wctx.arith
    q = wctx.qw
    nu = wctx.nuw
    lam_w = qb.lattice_arg(lam, 0, wctx)
    xn = qb.lattice_arg(lam, n, wctx)
    xq = qb.lattice_arg(lam, 0, wctx, shift=1)
    scale = q ** (n * (nu + 1))
    sign = -1 if which in "abe" else 1
    arg = sign * lam_w * lam_w

    if which in "abcd":
        fn = {
            "a": lambda x: qb.jv(x, wctx),
            "b": lambda x: qb.gamma_nu(x, wctx),
            "c": lambda x: qb.iv(x, wctx),
            "d": lambda x: _k(x, wctx, k_route),
        }[which]
        P, Q = pn_eval(arg, n, wctx)
        lhs = fn(xn)
        rhs = scale * (fn(lam_w) * P - q ** (nu + 1) * fn(xq) * Q)
    else:
        P, _ = pn_eval(arg, n, wctx)
        lhs = P
        pre = q ** (-n * (nu + 1)) * lam_w ** (2 * nu) / (q ** (-2 * nu) - 1)
        if which == "e":
            f, h = (lambda x: qb.jv(x, wctx)), (lambda x: qb.gamma_nu(x, wctx))
            rhs = pre * (f(xn) * h(xq) - h(xn) * f(xq))
        else:
            alpha = qt.constants(wctx).alpha_nu
            f, h = (lambda x: qb.iv(x, wctx)), (lambda x: _k(x, wctx, k_route))
            rhs = pre / alpha * (f(xn) * h(xq) - h(xn) * f(xq))
    res = abs(lhs - rhs) / max(abs(lhs), abs(rhs), FLOOR)
    return IdentityResult(which, float(lam), n, _out(lhs, ctx), _out(rhs, ctx), float(res), use_dps)


def _k(x, ctx: QContext, route: str):
    if route == "auto":
        return qt.macdonald(x, ctx).value
    if route == "integral":
        return qt.macdonald_integral(x, ctx).value
    if route == "decomposition":
        return qt.macdonald_decomposition(x, ctx).value
    raise DomainError(f"unknown K route {route!r}")


# --------------------------------------------------------------------------
# Stieltjes transform
# --------------------------------------------------------------------------


def _sigma(ctx: QContext):
    return qt.constants(ctx).sigma_nu


def _poch2(a, ctx: QContext):
    q2 = ctx.qw * ctx.qw
    return qpoch_inf(a, q2, ctx).value


def _nd_tilde(lam, ctx: QContext):
    """Pole-free numerator and denominator in ``lam = sqrt(-z)``.

    ``N = j_{-nu}(q**-nu lam) (lam**-2)(q2 lam**2) - sigma j(lam) (q**(2nu) lam**-2)(q**(2-2nu) lam**2)``
    ``D = q**(-2nu) j_{-nu}(q**(1-nu) lam) (lam**-2)(q2 lam**2) - sigma j(q lam) (q**(2nu) lam**-2)(q**(2-2nu) lam**2)``
    with infinite products in base ``q**2``.  Then ``S(z) = q**(-2nu) N / D``.
    """
    q = ctx.qw
    nu = ctx.nuw
    sig = _sigma(ctx)
    l2 = lam * lam
    A = _poch2(1 / l2, ctx) * _poch2(q * q * l2, ctx)
    B = _poch2(q ** (2 * nu) / l2, ctx) * _poch2(q ** (2 - 2 * nu) * l2, ctx)
    jm = lambda x: qb.jv(x, ctx, -nu, snap=False)  # noqa: E731
    jp = lambda x: qb.jv(x, ctx, snap=False)  # noqa: E731
    N = jm(q ** (-nu) * lam) * A - sig * jp(lam) * B
    D = q ** (-2 * nu) * jm(q ** (1 - nu) * lam) * A - sig * jp(q * lam) * B
    scaleD = abs(q ** (-2 * nu) * jm(q ** (1 - nu) * lam) * A) + abs(sig * jp(q * lam) * B)
    return N, D, scaleD


def _lam_of_z(z, ctx: QContext):
    ar = ctx.arith
    zc = ar.cplx(z) if is_complex(z) else ar.real(z)
    if not is_complex(zc) and zc < 0:
        return ar.sqrt(-zc)
    w = ar.sqrt(ar.cplx(-zc))
    return w


def stieltjes_closed(z, ctx: QContext, form: str = "corrected", pole_rtol: float = 1e-12):
    """Closed form of ``int dmu(t) / (z - t)``.

    The corrected form, with ``lam = sqrt(-z)`` and
    ``T = sigma (q**(2nu)/lam**2; q2)(q**(2-2nu) lam**2; q2) / ((1/lam**2; q2)(q2 lam**2; q2))``,
    is ``q**(-2nu) [j_{-nu}(q**-nu lam) - T j(lam)] / [q**(-2nu) j_{-nu}(q**(1-nu) lam) - T j(q lam)]``.
    On ``lam`` in the lattice ``T`` is infinite and the value reduces to
    ``q**(-2nu) j(lam) / j(q lam)``; on ``lam`` in ``q**nu`` times the
    lattice ``T = 0``.

    The printed form takes ``sqrt(z)`` in place of ``lam`` and differs in
    the power of ``q`` multiplying ``j_{-nu}``; it is kept as a diagnostic.

    Raises
    ------
    PoleError
        When the denominator vanishes to ``pole_rtol`` relative to its terms.
    """
    _forms(form)
    if form == "printed":
        return _stieltjes_printed(z, ctx, pole_rtol)
    q = ctx.qw
    nu = ctx.nuw
    lam = _lam_of_z(z, ctx)
    if not is_complex(lam) or lam.imag == 0:
        lr = lam.real if is_complex(lam) else lam
        m_q, m_qnu = qb._ray(lr, ctx)
        if m_q is not None:
            l = ctx.qpow(m_q)
            den = qb.jv(q * l, ctx)
            if abs(den) < pole_rtol:
                raise PoleError(f"z = {z} is on the support")
            return q ** (-2 * nu) * qb.jv(l, ctx) / den
        if m_qnu is not None:
            l = ctx.qpow(m_qnu) * q**nu
            den = qb.jv(q ** (1 - nu) * l, ctx, -nu, snap=False)
            if abs(den) < pole_rtol:
                raise PoleError(f"z = {z} is on the support")
            return qb.jv(q ** (-nu) * l, ctx, -nu, snap=False) / den
    N, D, scale = _nd_tilde(lam, ctx)
    if abs(D) <= pole_rtol * scale:
        raise PoleError(f"z = {z} is on the support")
    return q ** (-2 * nu) * N / D


def _stieltjes_printed(z, ctx: QContext, pole_rtol: float):
    q = ctx.qw
    nu = ctx.nuw
    ar = ctx.arith
    zz = ar.num(z)
    s = ar.sqrt(zz) if is_complex(zz) or zz >= 0 else ar.sqrt(ar.cplx(zz))
    sig = _sigma(ctx)
    A = _poch2(1 / zz, ctx) * _poch2(q * q * zz, ctx)
    B = _poch2(q ** (2 * nu) / zz, ctx) * _poch2(q ** (2 - 2 * nu) * zz, ctx)
    jqs = qb.jv(q * s, ctx, snap=False)
    inner_den = q ** (2 * nu) * qb.jv(q ** (1 - nu) * s, ctx, -nu, snap=False) * A - sig * jqs * B
    outer = q ** (nu + 1) * jqs
    if abs(outer) <= pole_rtol or abs(inner_den) <= pole_rtol * (abs(A) + abs(B)):
        raise PoleError(f"z = {z} is a pole of the printed closed form")
    inner = (q ** (-2 * nu) - 1) * A / inner_den
    return (qb.jv(s, ctx, snap=False) - inner) / outer


def stieltjes_limit(z, ctx: QContext, n_max: int = 400, a_prev=1.0, with_n: bool = False):
    """``lim Q_n(z) / P_n(z)`` with the standard ``a_{-1} = 1``.

    The four recurrence values are rescaled jointly whenever they grow, so
    only the ratio is ever formed.  Iteration stops once two successive
    ratios agree to ``series_tol`` relative.

    Raises
    ------
    NoConvergence
        If the ratio has not settled after ``n_max`` steps.
    """
    J = build_jacobi("zero", ctx, n_max)
    ar = ctx.arith
    zw = ar.num(z)
    P0, Pm = ar.one(), ar.zero()
    Q0, Qm = ar.zero(), -ar.one()
    prev = None
    settled = 0
    for n in range(n_max):
        a_nm1 = a_prev if n == 0 else J.a[n - 1]
        P1 = ((zw - J.b[n]) * P0 - a_nm1 * Pm) / J.a[n]
        Q1 = ((zw - J.b[n]) * Q0 - a_nm1 * Qm) / J.a[n]
        Pm, P0, Qm, Q0 = P0, P1, Q0, Q1
        big = abs(P0) + abs(Pm)
        if big > 1e100:
            Pm, P0, Qm, Q0 = Pm / big, P0 / big, Qm / big, Q0 / big
        if P0 == 0:
            settled = 0
            continue
        r = Q0 / P0
        if prev is not None and abs(r - prev) <= ctx.series_tol * abs(r):
            settled += 1
            if settled >= 2:
                return (r, n + 1) if with_n else r
        else:
            settled = 0
        prev = r
    raise NoConvergence(f"Q_n/P_n did not settle within {n_max} steps at z = {z}")


# --------------------------------------------------------------------------
# orthogonality measure
# --------------------------------------------------------------------------


class Provenance(str, Enum):
    printed_formula = "printed_formula"
    quadrature = "quadrature"
    closed_form = "closed_form"


@dataclass(frozen=True)
class SpectralMeasure:
    """Discrete measure ``sum_k A_k delta(t - t_k)``.

    ``support`` is ascending.  For ``closed_form`` and ``quadrature`` it
    lies in ``(-(1 + q**(2nu)) - 2 q**(nu+1), 0)`` and the masses sum to
    one; the ``printed_formula`` entries use the printed
    ``t_k = q**-2 (j_k)**2`` and printed mass expression.  ``rule_mass``
    is the weight sum of the whole Gauss rule (quadrature only).
    """

    support: np.ndarray
    masses: np.ndarray
    k_max: int
    provenance: Provenance
    zeros: np.ndarray | None = None
    rule_mass: float | None = None

    def total_mass(self) -> float:
        """Sum of the listed masses."""
        return float(np.sum(self.masses))


def _d_lambda(lam, ctx: QContext):
    return _nd_tilde(lam, ctx)[1]


def _closed_form_nodes(ctx: QContext, k_max: int, per_step: int = 24):
    """Sign changes of the pole-free denominator on a geometric grid."""
    q = float(ctx.q)
    nu = float(ctx.nu)
    top = math.sqrt((1 + q ** (2 * nu)) + 2 * q ** (nu + 1)) * 1.05
    f = lambda l: float(_d_lambda(l, ctx))  # noqa: E731
    roots = []
    i = 0
    l_prev = top
    v_prev = f(l_prev)
    limit = per_step * (k_max + 8)
    while len(roots) < k_max and i < limit:
        i += 1
        l = top * q ** (i / per_step)
        v = f(l)
        if not math.isfinite(v):
            raise BracketNotFound("denominator overflowed during the scan")
        if v == 0.0:
            roots.append(l)
        elif v_prev != 0.0 and (v > 0) != (v_prev > 0):
            roots.append(brentq(f, l, l_prev, xtol=1e-300, rtol=4 * np.finfo(float).eps))
        l_prev, v_prev = l, v
    if len(roots) < k_max:
        raise BracketNotFound(f"found {len(roots)} of {k_max} support points")
    return roots


def _closed_form_masses(roots, ctx: QContext):
    q = ctx.qw
    nu = ctx.nuw
    out = []
    for l in roots:
        h = 1e-20 * l
        dD = (_d_lambda(complex(l, h), ctx)).imag / h
        N, _, _ = _nd_tilde(l, ctx)
        # residue in z = -lam**2, dz = -2 lam dlam
        out.append(float(-2 * l * q ** (-2 * nu) * N / dD))
    return out


def measure(ctx: QContext, k_max: int, provenance: Provenance | str = "closed_form",
            N: int | None = None) -> SpectralMeasure:
    """Orthogonality measure of ``P_n``.

    Parameters
    ----------
    provenance : {"closed_form", "quadrature", "printed_formula"}
        ``closed_form``: poles and residues of the corrected Stieltjes
        transform.  ``quadrature``: the ``k_max`` outermost Gauss nodes of
        the ``N``-section (``N`` defaults to ``max(4 k_max, 60)``); the
        weight sum of the full rule is kept as ``rule_mass``.  ``printed_formula``: printed support
        ``q**-2 j_k**2`` and printed masses.
    """
    prov = Provenance(provenance)
    if k_max < 1:
        raise DomainError("k_max must be at least 1")
    if prov is Provenance.quadrature:
        N = N or max(4 * k_max, 60)
        J = build_jacobi("zero", ctx.in_double() if ctx.arith.is_mp else ctx, N)
        ts = truncated_spectrum(J, N)
        nodes = ts.nodes[:k_max]
        w = ts.weights[:k_max]
        return SpectralMeasure(np.array(nodes), np.array(w), k_max, prov,
                               rule_mass=float(np.sum(ts.weights)))
    if prov is Provenance.closed_form:
        roots = _closed_form_nodes(ctx, k_max)
        masses = _closed_form_masses(roots, ctx)
        z = -np.array(roots) ** 2
        order = np.argsort(z)
        return SpectralMeasure(z[order], np.array(masses)[order], k_max, prov, np.array(roots)[order])
    zl = qb.bessel_zeros(ctx.in_double() if ctx.arith.is_mp else ctx, k_max)
    q = float(ctx.q)
    nu = float(ctx.nu)
    support, masses = [], []
    for jk in zl.zeros:
        jk = float(jk)
        dj = float(qb.j_nu_derivative(jk, ctx))
        bracket = float(qb.jv(jk / q, ctx)) - (q ** (-2 * nu) - 1) / (
            q ** (2 * nu) * float(qb.jv(q ** (-nu) * jk, ctx, -nu, snap=False))
        )
        support.append(jk * jk / q**2)
        masses.append(2 * jk / (q ** (nu + 3) * dj) * bracket)
    return SpectralMeasure(np.array(support), np.array(masses), k_max, prov, np.array(zl.zeros, dtype=float))


# --------------------------------------------------------------------------
# related families
# --------------------------------------------------------------------------


def al_salam_ismail(n: int, x, ctx: QContext):
    """``R_n(x)`` from ``R_{n+1} + q**(4(n-1)) R_{n-1} = x R_n``, ``R_{-1} = 0``, ``R_0 = 1``.

    Examples
    --------
    >>> from qjacobi.qcore import QContext
    >>> al_salam_ismail(1, 0.3, QContext())
    0.3
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    prev, cur = 0, ctx.arith.one() if ctx.arith.is_mp else 1.0
    for k in range(n):
        prev, cur = cur, x * cur - ctx.qpow(4 * (k - 1)) * prev
    return cur


def al_salam_ismail_relation(n: int, x, ctx: QContext, form: str = "corrected"):
    """``(R_n(x), rhs, relative residual)`` for the link to the centrifugal family.

    corrected: ``rhs = q**(n**2 - n) Pc_n(q**(1+nu) x)``;
    printed: ``rhs = q**(n - n**2) Pc_n(q**-(1+nu) x)``,
    where ``Pc_n`` has ``a_n = q**(2n+1+nu)`` and ``b_n = 0``.
    """
    _forms(form)
    q = ctx.qw
    nu = ctx.nuw
    J = build_jacobi("centrifugal", ctx, max(n, 2))
    if form == "corrected":
        y = q ** (1 + nu) * x
        c = ctx.qpow(n * n - n)
    else:
        y = q ** (-(1 + nu)) * x
        c = ctx.qpow(n - n * n)
    rhs = c * solve_recurrence(J, y, n, "first_kind")[n]
    R = al_salam_ismail(n, x, ctx)
    return R, rhs, float(abs(R - rhs) / max(abs(R), abs(rhs), FLOOR))


def lommel_r(n: int, x, w, p, ctx: QContext | None = None):
    """q-Lommel-type polynomial from

    ``|w|**-1 p**(-1/2-n) r_{n+1} + p**-n (1 + w**-2) r_n + |w|**-1 p**(1/2-n) r_{n-1} = x r_n``

    with ``r_{-1} = 0``, ``r_0 = 1``.  No restriction on ``p`` or ``w`` is
    imposed; the inverted base ``p > 1`` is the case of interest here.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    aw = abs(w)
    prev, cur = 0, 1.0 if ctx is None or not ctx.arith.is_mp else ctx.arith.one()
    for k in range(n):
        up = p ** (-0.5 - k) / aw
        mid = p ** (-k) * (1 + w ** (-2))
        down = p ** (0.5 - k) / aw
        prev, cur = cur, ((x - mid) * cur - down * prev) / up
    return cur


def lommel_dictionary(n: int, x, ctx: QContext, form: str = "corrected"):
    """``(P_n(x), r-side, relative residual)`` with ``w = q**-nu`` and base ``q**-2``.

    corrected: ``P_n(x) = (-1)**n r_n(-x)``;  printed: ``P_n(x) = r_n(x)``.
    """
    _forms(form)
    q = ctx.qw
    w = q ** (-ctx.nuw)
    p = q ** (-2)
    P, _ = pn_eval(x, n, ctx)
    if form == "corrected":
        r = (-1) ** n * lommel_r(n, -x, w, p, ctx)
    else:
        r = lommel_r(n, x, w, p, ctx)
    return P, r, float(abs(P - r) / max(abs(P), abs(r), FLOOR))
