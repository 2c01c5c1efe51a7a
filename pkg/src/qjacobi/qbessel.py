"""Hahn-Exton q-Bessel functions in base ``q**2`` and their modified forms.

The normalized function is

    j_a(x) = sum_n (-1)**n q**(n(n+1)) x**(2n) / ((q2;q2)_n (q**(2a+2);q2)_n)

with ``q2 = q**2``.  For ``|x|`` above ``SYMMETRIC_SWITCH`` the power series
is replaced by the rearrangement

    (q**(2a+2);q2)_inf j_a(x)
        = sum_k (-1)**k q**(k(k-1)) q**((2a+2)k) (q**(2k+2) x**2;q2)_inf / (q2;q2)_k

whose terms carry the oscillation inside infinite products.  At a lattice
point ``x = q**-m`` every term with ``k < m`` contains a zero factor, so the
small values of ``j`` there come out with full relative accuracy instead of
as the difference of huge partial sums.

Lattice snapping: a real argument within ``LATTICE_RTOL`` of ``q**m`` is
evaluated as exactly ``q**m`` (all product exponents are then integers and
the vanishing factors are exact zeros).  Pass ``snap=False`` to turn this
off, as the zero finder does.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

from scipy.optimize import brentq

from .errors import BracketNotFound, Divergent, DomainError, MaxTermsExceeded, PoleWarning
from .qcore import (
    QContext,
    SeriesValue,
    TruncationRule,
    is_complex,
    lattice_index,
    qpoch_finite,
    qpoch_inf,
    rphis,
)

__all__ = [
    "BesselKind",
    "ZeroList",
    "LimitRatio",
    "SYMMETRIC_SWITCH",
    "j_nu",
    "J_nu_big",
    "i_nu",
    "gamma_nu",
    "pi_nu",
    "j_nu_derivative",
    "bessel_zeros",
    "limit_ratio",
    "limit_ratio_closed",
    "classify_ray",
    "jv",
    "iv",
    "bound_constant",
    "product_series",
    "evaluate",
    "lattice_arg",
]

SYMMETRIC_SWITCH = 1.5
LATTICE_RTOL = 1e-13


class BesselKind(str, Enum):
    """Closed set of function families handled by :func:`evaluate`."""

    J_big = "J_big"
    j_normalized = "j_normalized"
    I_modified = "I_modified"
    gamma_modified = "gamma_modified"
    pi_modified = "pi_modified"


@dataclass(frozen=True)
class ZeroList:
    """Ascending positive zeros of ``j_nu`` with residual information.

    ``residuals[k]`` is ``|j_nu(zeros[k])|`` and ``scales[k]`` is
    ``|zeros[k] * j_nu'(zeros[k])|``; their quotient is the relative
    position error of the zero.
    """

    zeros: tuple
    residual_bound: float
    residuals: tuple = ()
    scales: tuple = ()
    brackets: tuple = ()


@dataclass(frozen=True)
class LimitRatio:
    """Sequence value and closed form of the limit ratio."""

    n: int
    sequence: complex
    closed: complex


# --------------------------------------------------------------------------
# series cores (duck typed: float, complex, mpf, mpc)
# --------------------------------------------------------------------------


def _order(ctx: QContext, order):
    return ctx.nuw if order is None else ctx.arith.real(order)


def _snap(x, ctx: QContext, snap: bool):
    if not snap or is_complex(x):
        return None
    if not x > 0:
        return None
    return lattice_index(x, ctx.q, rtol=LATTICE_RTOL)


def _direct(x, ctx: QContext, a, sign: int) -> SeriesValue:
    """Power series; ``sign=-1`` gives j, ``sign=+1`` the modified I."""
    ar = ctx.arith
    q = ctx.qw
    q2 = q * q
    qa = q ** (2 * a + 2)
    x2 = x * x
    term = ar.one() if not is_complex(x) else ar.cplx(1)
    total = term
    stop = TruncationRule(ctx.series_tol)
    terms = [term]
    q2n = ar.one()
    qan = ar.one()
    n = 0
    while True:
        n += 1
        q2n = q2n * q2
        # (q2;q2)_n and (q^{2a+2};q2)_n factors
        den = (1 - q2n) * (1 - qa * qan)
        qan = qan * q2
        term = term * sign * q2n * x2 / den
        terms.append(term)
        total = total + term
        if stop.done(n, abs(term), abs(total)):
            break
        if n >= ctx.max_terms:
            raise MaxTermsExceeded("q-Bessel power series did not converge")
    return SeriesValue(ar.fsum(terms), n + 1, float(abs(term)) * 2.0)


def _theta_lattice(J: int, ctx: QContext):
    """``prod_{i>=0} (1 - q**(2(J+i)))``; exactly zero when ``J <= 0``."""
    if J <= 0:
        return ctx.arith.zero()
    return qpoch_inf(ctx.qpow(2 * J), ctx.qw**2, ctx).value


def _symmetric(x, ctx: QContext, a, m: int | None) -> SeriesValue:
    """Rearranged series, see the module docstring.

    ``m`` is the lattice exponent of ``x`` when ``x == q**m`` exactly.
    """
    ar = ctx.arith
    q = ctx.qw
    q2 = q * q
    c = q ** (2 * a + 2)
    x2 = x * x
    mag = float(abs(x))
    m_est = max(0, math.ceil(math.log(mag) / -math.log(ctx.q))) if mag > 1 else 0
    extra = math.ceil(math.sqrt(-math.log(ctx.eps * 1e-3) / -math.log(ctx.q))) + 8
    K = m_est + extra
    while True:
        if K > ctx.max_terms:
            raise MaxTermsExceeded("symmetric q-Bessel series did not converge")
        # products P_k = (q^{2k+2} x^2; q2)_inf for k = 0..K, built downward
        prods = [None] * (K + 1)
        if m is not None:
            # x = q**m, so P_k = prod_i (1 - q**(2(m + k + 1 + i)))
            top = _theta_lattice(m + K + 1, ctx)
            prods[K] = top
            for k in range(K - 1, -1, -1):
                J = m + k + 1
                f = 1 - ctx.qpow(2 * J)
                prods[k] = f * prods[k + 1]
        else:
            prods[K] = qpoch_inf(x2 * ctx.qpow(2 * K + 2), q2, ctx).value
            for k in range(K - 1, -1, -1):
                prods[k] = (1 - x2 * ctx.qpow(2 * k + 2)) * prods[k + 1]
        terms = []
        coef = ar.one()  # (-1)^k q^{k(k-1)} c^k / (q2;q2)_k
        for k in range(K + 1):
            if k > 0:
                coef = coef * (-1) * ctx.qpow(2 * (k - 1)) * c / (1 - ctx.qpow(2 * k))
            terms.append(coef * prods[k])
        total = ar.fsum(terms)
        tail = max(abs(t) for t in terms[-3:])
        if tail <= ctx.series_tol * abs(total) * 1e-2 or total == 0 and tail == 0:
            break
        if tail <= ctx.series_tol * abs(total):
            break
        K *= 2
    norm = qpoch_inf(c, q2, ctx).value
    return SeriesValue(total / norm, K + 1, float(tail / abs(norm)) * 2.0)


def _j(x, ctx: QContext, order=None, snap: bool = True) -> SeriesValue:
    a = _order(ctx, order)
    ar = ctx.arith
    x = ar.num(x)
    if abs(x) <= SYMMETRIC_SWITCH:
        return _direct(x, ctx, a, -1)
    m = _snap(x, ctx, snap)
    if m is not None:
        x = ctx.qpow(m)
    return _symmetric(x, ctx, a, m)


def jv(x, ctx: QContext, order=None, snap: bool = True):
    """Plain value of ``j_order(x; q**2)`` (default order ``ctx.nu``)."""
    return _j(x, ctx, order, snap).value


def iv(x, ctx: QContext, order=None):
    """Plain value of the modified function ``I_order(x; q**2)``."""
    return i_nu(x, ctx, order).value


# --------------------------------------------------------------------------
# public evaluators
# --------------------------------------------------------------------------


def j_nu(x, ctx: QContext, order=None, snap: bool = True) -> SeriesValue:
    """Normalized Hahn-Exton q-Bessel function ``j_nu(x; q**2)``.

    Parameters
    ----------
    x : scalar
        Real or complex argument.
    ctx : QContext
    order : float, optional
        Order to use instead of ``ctx.nu`` (``-ctx.nu`` is the common case).
    snap : bool
        Evaluate near-lattice real arguments as exact lattice points.

    Examples
    --------
    >>> from qjacobi.qcore import QContext
    >>> float(j_nu(0.0, QContext()).value)
    1.0
    """
    return _j(x, ctx, order, snap)


def J_nu_big(x, ctx: QContext, order=None):
    """Unnormalized third Jackson function ``J_nu(x; q**2)``.

    ``x**nu (q**(2nu+2);q2)_inf / (q2;q2)_inf * j_nu(x)``.
    """
    if is_complex(x) or not x > 0:
        raise DomainError("J_nu is evaluated on the positive real axis only")
    a = _order(ctx, order)
    q2 = ctx.qw**2
    pre = qpoch_inf(q2 ** (a + 1), q2, ctx).value / qpoch_inf(q2, q2, ctx).value
    x = ctx.arith.real(x)
    return pre * x**a * jv(x, ctx, order)


def i_nu(x, ctx: QContext, order=None) -> SeriesValue:
    """Modified function ``I_nu(x) = j_nu(i x)``.

    Real arguments use the series with all signs positive, no complex
    arithmetic involved.
    """
    a = _order(ctx, order)
    x = ctx.arith.num(x)
    if is_complex(x):
        return _j(x * 1j, ctx, order, snap=False)
    return _direct(x, ctx, a, +1)


def gamma_nu(x, ctx: QContext, snap: bool = True):
    """Second solution ``x**(-2nu) j_{-nu}(q**-nu x)`` of the j-equation."""
    if is_complex(x) or not x > 0:
        raise DomainError("gamma_nu requires x > 0")
    x = ctx.arith.real(x)
    nu = ctx.nuw
    return x ** (-2 * nu) * jv(ctx.qw ** (-nu) * x, ctx, -nu, snap)


def pi_nu(x, ctx: QContext):
    """Second solution ``x**(-2nu) I_{-nu}(q**-nu x)`` of the I-equation."""
    if is_complex(x) or not x > 0:
        raise DomainError("pi_nu requires x > 0")
    x = ctx.arith.real(x)
    nu = ctx.nuw
    return x ** (-2 * nu) * iv(ctx.qw ** (-nu) * x, ctx, -nu)


def evaluate(kind: BesselKind | str, x, ctx: QContext):
    """Dispatch on :class:`BesselKind` and return a plain value."""
    kind = BesselKind(kind)
    if kind is BesselKind.J_big:
        return J_nu_big(x, ctx)
    if kind is BesselKind.j_normalized:
        return jv(x, ctx)
    if kind is BesselKind.I_modified:
        return iv(x, ctx)
    if kind is BesselKind.gamma_modified:
        return gamma_nu(x, ctx)
    return pi_nu(x, ctx)


def j_nu_derivative(x, ctx: QContext, order=None):
    """Derivative ``d/dx j_nu(x; q**2)``.

    Term-wise differentiated power series for ``|x| <= SYMMETRIC_SWITCH``;
    beyond that a complex-step derivative of the rearranged series, which
    is analytic in ``x`` and free of subtractive error.
    """
    a = _order(ctx, order)
    ar = ctx.arith
    x = ar.real(x)
    if abs(x) <= SYMMETRIC_SWITCH:
        q = ctx.qw
        q2 = q * q
        qa = q ** (2 * a + 2)
        x2 = x * x
        coef = ar.one()  # (-1)^n q^{n(n+1)} / ((q2;q2)_n (qa;q2)_n)
        terms = []
        stop = TruncationRule(ctx.series_tol)
        total = ar.zero()
        q2n = ar.one()
        qan = ar.one()
        xp = x  # x^{2n-1}
        n = 0
        while True:
            n += 1
            q2n = q2n * q2
            coef = coef * (-1) * q2n / ((1 - q2n) * (1 - qa * qan))
            qan = qan * q2
            t = coef * 2 * n * xp
            xp = xp * x2
            terms.append(t)
            total = total + t
            if stop.done(n, abs(t), abs(total)):
                break
            if n >= ctx.max_terms:
                raise MaxTermsExceeded("derivative series did not converge")
        return ar.fsum(terms)
    h = abs(x) * (1e-20 if not ar.is_mp else 10.0 ** (-(ar.dps // 2) - 5))
    z = ar.cplx(x) + 1j * h
    return (jv(z, ctx, order, snap=False).imag) / h


def bound_constant(ctx: QContext):
    """Constant ``C`` of the lattice bound on ``|j_nu(q**n)|``.

    ``C = (-q2;q2)_inf (-q**(2nu+2);q2)_inf / (q**(2nu+2);q2)_inf`` with
    ``|j_nu(q**n)| <= C`` for ``n >= 0`` and ``<= C q**(n**2 - (2nu+1) n)``
    for ``n < 0``.
    """
    q2 = ctx.qw**2
    c = ctx.qw ** (2 * ctx.nuw + 2)
    return (
        qpoch_inf(-q2, q2, ctx).value
        * qpoch_inf(-c, q2, ctx).value
        / qpoch_inf(c, q2, ctx).value
    )


def product_series(alpha, beta, a, b, x, ctx: QContext, form: str = "corrected") -> SeriesValue:
    """Power series of ``j_alpha(a x) j_beta(b x)`` in ``x**2``.

    The coefficient of ``x**(2m)`` is

        (-1)**m q**(m(m+1)) b**(2m) / ((q2;q2)_m (q**(2beta+2);q2)_m)
            * 2phi1(q**-2m, q**(-2m-2beta); q**(2alpha+2); q2, z_m)

    with ``z_m = q**(2m+2beta+2) a**2 / b**2``; each ``2phi1`` terminates
    after ``m + 1`` terms.  ``form="printed"`` uses the m-independent
    argument ``(q**(alpha+beta+1) a/b)**2`` instead, whose coefficients
    grow like ``q**(-m**2)``; that variant raises :class:`Divergent`.
    """
    if form not in ("corrected", "printed"):
        raise DomainError(f"unknown form {form!r}")
    ar = ctx.arith
    q = ctx.qw
    q2 = q * q
    alpha = ar.real(alpha)
    beta = ar.real(beta)
    a = ar.num(a)
    b = ar.num(b)
    x2 = ar.num(x) ** 2
    if b == 0:
        raise DomainError("b must be nonzero")
    stop = TruncationRule(ctx.series_tol)
    terms = []
    running = 0
    grow = 0
    m = 0
    while True:
        if form == "corrected":
            z = q ** (2 * m + 2 * beta + 2) * a * a / (b * b)
        else:
            z = (q ** (alpha + beta + 1) * a / b) ** 2
        try:
            phi = rphis([q2 ** (-m), q2 ** (-m) * q ** (-2 * beta)], [q ** (2 * alpha + 2)], q2, z, ctx,
                        terminate=m).value
        except OverflowError as exc:
            raise Divergent("product series coefficients overflow") from exc
        c = (-1) ** m * q ** (m * (m + 1)) * b ** (2 * m)
        c = c / (qpoch_finite(q2, q2, m) * qpoch_finite(q ** (2 * beta + 2), q2, m))
        t = c * phi * x2**m
        grow = grow + 1 if terms and abs(t) > abs(terms[-1]) else 0
        terms.append(t)
        running = running + t
        m += 1
        if m > 8 and grow >= 8:
            raise Divergent("product series terms keep growing")
        if stop.done(m, abs(t), abs(running)):
            break
        if m >= ctx.max_terms:
            raise MaxTermsExceeded("product series not converged")
    return SeriesValue(ar.fsum(terms), m, float(abs(terms[-1])) * 2.0)


# --------------------------------------------------------------------------
# zeros
# --------------------------------------------------------------------------


def bessel_zeros(ctx: QContext, k_max: int, refine: int = 16, order=None) -> ZeroList:
    """First ``k_max`` positive zeros of ``j_nu(x; q**2)``.

    The geometric grid ``x = q**(-m/refine)`` is scanned for sign changes,
    starting below ``x = 1`` and stopping at ``q**lattice_lo``; each bracket
    is then narrowed with a bracketing root finder to relative width about
    ``1e-14``.  Lattice snapping is disabled throughout because zeros of
    large index sit within rounding distance of lattice points.

    Raises
    ------
    BracketNotFound
        When the window holds fewer than ``k_max`` sign changes.
    """
    if k_max < 1:
        raise DomainError("k_max must be at least 1")
    if ctx.arith.is_mp:
        raise DomainError("zero finding runs in double precision")

    def f(x):
        return float(jv(x, ctx, order, snap=False))

    zeros, res, scales, brackets = [], [], [], []
    m = -2 * refine
    x0 = ctx.q ** (-m / refine)
    f0 = f(x0)
    stop_m = -ctx.lattice_lo * refine
    while len(zeros) < k_max:
        m += 1
        if m > stop_m:
            raise BracketNotFound(
                f"found {len(zeros)} of {k_max} zeros below q**{ctx.lattice_lo}"
            )
        x1 = ctx.q ** (-m / refine)
        try:
            f1 = f(x1)
        except (OverflowError, MaxTermsExceeded) as exc:
            raise BracketNotFound(
                f"found {len(zeros)} of {k_max} zeros before overflow at x={x1:.3g}"
            ) from exc
        if not math.isfinite(f1):
            raise BracketNotFound(f"found {len(zeros)} of {k_max} zeros before overflow")
        if f0 == 0.0:
            z = x0
        elif f0 * f1 < 0:
            z = brentq(f, x0, x1, xtol=1e-300, rtol=1e-15, maxiter=500)
        else:
            x0, f0 = x1, f1
            continue
        brackets.append((x0, x1))
        zeros.append(z)
        res.append(abs(f(z)))
        scales.append(abs(z * float(j_nu_derivative(z, ctx, order))))
        x0, f0 = x1, f1
    return ZeroList(tuple(zeros), max(res) * (1 + 1e-12), tuple(res), tuple(scales), tuple(brackets))


# --------------------------------------------------------------------------
# limit ratio
# --------------------------------------------------------------------------


def lattice_arg(lam, n: int, ctx: QContext, shift=0):
    """``q**(-n + shift) * lam`` keeping lattice points exact.

    When ``lam`` is a lattice point ``q**m`` the result is formed as
    ``q**(m - n + shift)`` in one power, so downstream snapping sees an
    exact lattice argument.
    """
    m = _snap(lam, ctx, True)
    if m is not None and float(shift) == int(shift):
        return ctx.qpow(m - n + int(shift))
    return ctx.qpow(-n + shift) * ctx.arith.num(lam)


def _theta_quotient(lam, ctx: QContext):
    """``(q**2nu/lam**2;q2)(q**(2-2nu) lam**2;q2) / ((1/lam**2;q2)(q2 lam**2;q2))``."""
    q2 = ctx.qw**2
    nu = ctx.nuw
    l2 = lam * lam
    num = qpoch_inf(q2**nu / l2, q2, ctx).value * qpoch_inf(q2 ** (1 - nu) * l2, q2, ctx).value
    den = qpoch_inf(1 / l2, q2, ctx).value * qpoch_inf(q2 * l2, q2, ctx).value
    return num / den


def limit_ratio_closed(lam, ctx: QContext):
    """Closed form of the limit ratio, ``sigma_nu`` times a theta quotient."""
    ar = ctx.arith
    q2 = ctx.qw**2
    nu = ctx.nuw
    sigma = qpoch_inf(q2 ** (nu + 1), q2, ctx).value / qpoch_inf(q2 ** (1 - nu), q2, ctx).value
    return sigma * _theta_quotient(ar.num(lam), ctx)


def _range_ctx(ctx: QContext, n: int, lam) -> QContext:
    # values reach q**(-n**2); move to mpmath (unbounded exponent) if needed
    mag = n * n * -math.log(ctx.q) + 2 * n * math.log(max(1.0, abs(complex(lam))) + 1)
    if ctx.arith.is_mp or mag < 600:
        return ctx
    return ctx.elevated(30)


def limit_ratio(lam, ctx: QContext, n: int) -> LimitRatio:
    """``q**(2 nu n) j_{-nu}(q**(-n-nu) lam) / j_nu(q**-n lam)`` and its limit.

    Parameters
    ----------
    lam : complex
        Off the rays ``R_q`` and ``q**nu R_q`` the sequence converges to the
        closed form; on ``R_q`` it diverges, on ``q**nu R_q`` it vanishes.
    n : int
        Index of the sequence element.

    Notes
    -----
    Lattice points on either ray are handled with exact exponents so that
    the recessive factor is computed accurately.  Large ``n`` switches to a
    30-digit mpmath context for exponent range only.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    wctx = _range_ctx(ctx, n, lam)
    ar = wctx.arith
    nu = wctx.nuw
    lam_w = ar.num(lam)
    m_q, m_qnu = _ray(lam, ctx)
    on_ray = m_q is not None or m_qnu is not None
    if on_ray:
        warnings.warn(
            "lambda lies on an excluded ray; closed form not applicable",
            PoleWarning,
            stacklevel=2,
        )
    if m_q is not None:
        den = jv(wctx.qpow(m_q - n), wctx)
        arg = wctx.qw ** (m_q - n - nu)
    elif m_qnu is not None:
        # lam = q**(nu + m): the j_{-nu} argument is the lattice point q**(m - n)
        den = jv(wctx.qw ** (m_qnu - n + nu), wctx)
        arg = wctx.qpow(m_qnu - n)
    else:
        den = jv(wctx.qpow(-n) * lam_w, wctx)
        arg = wctx.qw ** (-n - nu) * lam_w
    if den == 0:
        raise DomainError("j_nu(q**-n lam) vanishes")
    seq = wctx.qw ** (2 * nu * n) * jv(arg, wctx, -nu) / den
    closed = None if on_ray else _to_builtin(limit_ratio_closed(lam, ctx))
    return LimitRatio(n, _to_builtin(seq), closed)


def _ray(lam, ctx: QContext):
    """Exponents ``m`` with ``lam = q**m`` and with ``lam = q**(nu + m)``."""
    if is_complex(lam) and complex(lam).imag != 0:
        return None, None
    x = float(complex(lam).real)
    if not x > 0:
        return None, None
    m_q = lattice_index(x, ctx.q, rtol=LATTICE_RTOL)
    m_qnu = lattice_index(x * ctx.q ** (-ctx.nu), ctx.q, rtol=LATTICE_RTOL)
    return m_q, m_qnu


def _to_builtin(v):
    if is_complex(v):
        c = complex(v)
        return c if c.imag != 0 else complex(c.real, 0.0)
    return complex(float(v), 0.0)


def classify_ray(lam, ctx: QContext, n_values=range(4, 13)) -> str:
    """Classify the sequence behaviour as ``diverges``, ``vanishes`` or ``converges``.

    Decided from the last few successive magnitude ratios: a factor
    beyond ``1e2`` per step means divergence, below ``1e-2`` vanishing.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PoleWarning)
        seq = [abs(limit_ratio(lam, ctx, n).sequence) for n in n_values]
    ratios = [seq[i + 1] / seq[i] for i in range(len(seq) - 1) if seq[i] != 0]
    tail = ratios[-3:]
    if all(r > 1e2 for r in tail):
        return "diverges"
    if all(r < 1e-2 for r in tail) or seq[-1] == 0:
        return "vanishes"
    return "converges"

