"""q-Bessel Fourier transform and the q-Macdonald function.

The transform of a lattice function ``f`` is

    F(f)(x) = c_{q,nu} * int_0^inf f(t) j_nu(x t) t**(2nu+1) d_q t,
    c_{q,nu} = (q**(2nu+2);q2)_inf / ((1-q) (q2;q2)_inf),

and ``K_nu = F(t -> 1/(1+t**2))``.  K is available through three routes:

``integral``
    The defining Jackson sum.  Accurate for ``x <= q**-2`` or so; beyond
    that the sum of O(x**-(2nu+2)) terms cancels down to ``~ q**(n**2)``.
``decomposition``
    ``alpha_nu [pi_nu(x) - beta_nu I_nu(x)]``, valid for every ``x > 0``
    but cancelling for large ``x`` in the same way.
``recurrence``
    On the lattice ``x = q**-n`` K is the minimal solution of the
    three-term recurrence obtained from ``Delta_{q,nu} y = y``; its ratios
    come from a backward continued fraction and are anchored at ``K(1)``
    from the integral route.  Stable for all ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CancellationLoss, DomainError, PrecisionFloor
from .qbessel import iv, jv, pi_nu
from .qcore import (
    JacksonValue,
    LatticeFunction,
    QContext,
    jackson_0_to_inf,
    lattice_index,
    qpoch_inf,
)

__all__ = [
    "QConstants",
    "MacdonaldEval",
    "DecayReport",
    "constants",
    "c_qnu",
    "sigma_nu",
    "fourier",
    "fourier_table",
    "weighted_norm",
    "macdonald_integral",
    "macdonald_decomposition",
    "macdonald_recurrence",
    "macdonald",
    "minimal_ratios",
    "decay_report",
]


@dataclass(frozen=True)
class QConstants:
    """Normalization and connection constants for one ``(q, nu)``."""

    c_qnu: float
    alpha_nu: float
    beta_nu: float
    sigma_nu: float


@dataclass(frozen=True)
class MacdonaldEval:
    """A value of ``K_nu(x; q**2)`` and how it was obtained.

    ``method`` is one of ``integral``, ``decomposition``, ``recurrence``.
    ``cancellation`` is set when the estimated error exceeds
    ``series_tol * |value|``.
    """

    x: float
    value: float
    method: str
    est_error: float
    cancellation: bool = False


@dataclass(frozen=True)
class DecayReport:
    """Decay data for ``K_nu(q**-n)``.

    ``ratios[i]`` is ``K(q**-n)/K(q**-(n-1))`` for ``n = i + 1`` and
    ``scaled_ratios`` the same multiplied by ``q**-nu``.  The fit is
    ``log|K(q**-n)| ~ slope_check n**2 + b n + c0``; ``fitted_c = exp(b)`` and
    ``fitted_sigma`` is the smallest ``sigma`` with
    ``|K(q**-n)| <= sigma fitted_c**n q**(n**2)`` on the sampled range.
    """

    n: tuple
    values: tuple
    ratios: tuple
    scaled_ratios: tuple
    fitted_sigma: float
    fitted_c: float
    slope_check: float
    log_q: float
    constant_sign: bool
    monotone_ratios: bool
    fit_coefficients: tuple = field(default=())


# --------------------------------------------------------------------------
# constants
# --------------------------------------------------------------------------


def c_qnu(ctx: QContext):
    """``(q**(2nu+2);q2)_inf / ((1-q)(q2;q2)_inf)``."""
    q = ctx.qw
    q2 = q * q
    return qpoch_inf(q2 ** (ctx.nuw + 1), q2, ctx).value / (
        (1 - q) * qpoch_inf(q2, q2, ctx).value
    )


def sigma_nu(ctx: QContext, order=None):
    """``(q**(2a+2);q2)_inf / (q**(2-2a);q2)_inf`` for ``a = order`` (default ``nu``).

    Unlike the context order, ``order`` may be an integer; ``order=0``
    gives exactly one.
    """
    q2 = ctx.qw**2
    a = ctx.nuw if order is None else ctx.arith.real(order)
    return qpoch_inf(q2 ** (a + 1), q2, ctx).value / qpoch_inf(q2 ** (1 - a), q2, ctx).value


def constants(ctx: QContext) -> QConstants:
    """``c_{q,nu}``, ``alpha_nu``, ``beta_nu`` and ``sigma_nu``.

    ``alpha_nu`` uses the product ``(q2;q2)_inf/(q**(2nu);q2)_inf`` for
    ``nu >= 0`` and, for ``nu < 0``,
    ``-(c_{q,nu}/beta_nu) int_0^inf t**(2nu+1)/(1+t**2) d_q t``.
    The ``nu < 0`` integral is summed at elevated precision since its tails
    decay only like ``q**|n|``.  Results are cached per context.
    """
    return _constants(ctx)


@lru_cache(maxsize=64)
def _constants(ctx: QContext) -> QConstants:
    q = ctx.qw
    q2 = q * q
    nu = ctx.nuw

    def P(a):
        return qpoch_inf(a, q2, ctx).value

    c = c_qnu(ctx)
    sigma = sigma_nu(ctx)
    beta = sigma * P(-(q2**nu)) * P(-(q2 ** (1 - nu))) / (P(-1) * P(-q2))
    if float(nu) >= 0:
        alpha = P(q2) / P(q2**nu)
    else:
        # geometric tail at both ends: sum at higher precision, then round
        hp = ctx.elevated(max(30, (ctx.dps or 0) + 10))
        hnu = hp.nuw
        integral = jackson_0_to_inf(lambda t: t ** (2 * hnu + 1) / (1 + t * t), hp).value
        alpha = -c / beta * ctx.arith.real(integral)
    return QConstants(c, alpha, beta, sigma)


# --------------------------------------------------------------------------
# transform
# --------------------------------------------------------------------------


def _sample_fn(f, ctx):
    if isinstance(f, LatticeFunction):
        return f
    return LatticeFunction.from_rule(f, ctx.q)


def fourier(f, x, ctx: QContext, with_error: bool = False):
    """q-Bessel Fourier transform of ``f`` at ``x``.

    ``f`` is a :class:`~qjacobi.qcore.LatticeFunction` or a callable of the
    lattice point.  With ``with_error`` a ``(value, est_error)`` pair is
    returned; the estimate adds the truncation tails and a rounding term
    ``eps * sum |terms|``.
    """
    f = _sample_fn(f, ctx)
    nu = ctx.nuw
    x = ctx.arith.real(x)
    absterms = []

    if f.zero_outside and f.support is not None:
        lo, hi = f.support
        samples = {}
        for n in range(lo, hi + 1):
            t = ctx.qpow(n)
            v = f.at(n, ctx) * jv(x * t, ctx) * t ** (2 * nu + 1)
            samples[n] = v
            absterms.append(abs(v) * t)
        jv_ = jackson_0_to_inf(LatticeFunction.from_samples(samples, ctx.q, zero_outside=True), ctx)
    else:
        xm = lattice_index(x, ctx.q)

        def integrand(t):
            n = lattice_index(t, ctx.q)
            xt = ctx.qpow(xm + n) if (xm is not None and n is not None) else x * t
            v = f(t) * jv(xt, ctx) * t ** (2 * nu + 1)
            absterms.append(abs(v) * t)
            return v

        jv_ = jackson_0_to_inf(integrand, ctx)
    c = constants(ctx).c_qnu
    value = c * jv_.value
    if not with_error:
        return value
    rounding = ctx.eps * 8 * float(sum(absterms)) * float(1 - ctx.qw)
    return value, float(abs(c)) * (jv_.tail_bound + rounding)


def fourier_table(f, ctx: QContext, lo: int, hi: int) -> LatticeFunction:
    """``F(f)`` sampled at ``q**n`` for ``lo <= n <= hi``."""
    return LatticeFunction.from_samples(
        {n: fourier(f, ctx.qpow(n), ctx) for n in range(lo, hi + 1)}, ctx.q
    )


def weighted_norm(f, ctx: QContext):
    """``(int_0^inf |f(t)|**2 t**(2nu+1) d_q t) ** 0.5``."""
    f = _sample_fn(f, ctx)
    nu = ctx.nuw
    if f.zero_outside and f.support is not None:
        lo, hi = f.support
        s = LatticeFunction.from_samples(
            {n: abs(f.at(n, ctx)) ** 2 * ctx.qpow(n) ** (2 * nu + 1) for n in range(lo, hi + 1)},
            ctx.q,
            zero_outside=True,
        )
        val = jackson_0_to_inf(s, ctx).value
    else:
        val = jackson_0_to_inf(lambda t: abs(f(t)) ** 2 * t ** (2 * nu + 1), ctx).value
    return val**0.5


# --------------------------------------------------------------------------
# q-Macdonald function
# --------------------------------------------------------------------------


def _flag(value, err, ctx) -> bool:
    return err > ctx.series_tol * abs(value)


def macdonald_integral(x, ctx: QContext) -> MacdonaldEval:
    """``K_nu(x)`` from its defining Jackson integral; ``x`` on the lattice."""
    m = lattice_index(x, ctx.q)
    if m is None:
        raise DomainError("the integral route needs a lattice point x = q**m")
    nu = ctx.nuw
    absterms = []

    def integrand(t):
        n = lattice_index(t, ctx.q)
        v = jv(ctx.qpow(m + n), ctx) * t ** (2 * nu + 1) / (1 + t * t)
        absterms.append(abs(v) * t)
        return v

    jres: JacksonValue = jackson_0_to_inf(integrand, ctx)
    c = constants(ctx).c_qnu
    value = c * jres.value
    rounding = ctx.eps * 8 * float(sum(absterms)) * float(1 - ctx.qw)
    err = float(abs(c)) * (jres.tail_bound + rounding)
    return MacdonaldEval(_f(x), value, "integral", err, _flag(value, err, ctx))


def macdonald_decomposition(x, ctx: QContext, strict: bool = False) -> MacdonaldEval:
    """``alpha_nu [pi_nu(x) - beta_nu I_nu(x)]``.

    ``est_error`` combines a rounding term for each series with the
    cancellation term ``|alpha| (|pi| + |beta I|) eps``.  With ``strict``
    a flagged cancellation raises :class:`CancellationLoss`.
    """
    if not x > 0:
        raise DomainError("x must be positive")
    k = constants(ctx)
    p = pi_nu(x, ctx)
    i = iv(ctx.arith.real(x), ctx)
    value = k.alpha_nu * (p - k.beta_nu * i)
    err = float(abs(k.alpha_nu)) * (float(abs(p)) + float(abs(k.beta_nu * i))) * ctx.eps * 16
    flagged = _flag(value, err, ctx)
    if strict and flagged:
        raise CancellationLoss(f"decomposition at x={float(x):g} keeps too few digits")
    return MacdonaldEval(_f(x), value, "decomposition", err, flagged)


def minimal_ratios(ctx: QContext, n_hi: int, V=None, lam=-1.0, extra: int = 40):
    """Ratios ``nu_n = q**-nu f_n / f_{n-1}`` of the minimal solution.

    ``f_n = f(q**-n)`` solves ``Delta_{q,nu} f - V f = lam f`` on the
    lattice, i.e. ``nu_{n+1} = A_n - 1/nu_n`` with
    ``A_n = q**-nu [q**(-2n) (V(q**-n) - lam) + 1 + q**(2nu)]``.  The
    minimal solution is obtained from the backward continued fraction
    ``nu_n = 1 / (A_n - nu_{n+1})`` started at ``nu_{n_hi+extra} = 0``.

    Returns a dict ``{n: nu_n}`` for ``1 <= n <= n_hi``.
    """
    q = ctx.qw
    nu = ctx.nuw
    q2n = q ** (2 * nu)

    def A(n):
        v = 0 if V is None else V(ctx.qpow(-n))
        return q ** (-nu) * (ctx.qpow(-2 * n) * (v - lam) + 1 + q2n)

    out = {}
    r = ctx.arith.zero()
    for n in range(n_hi + extra, 0, -1):
        r = 1 / (A(n) - r)
        if n <= n_hi:
            out[n] = r
    return out


def macdonald_recurrence(n: int, ctx: QContext, anchor: MacdonaldEval | None = None) -> MacdonaldEval:
    """``K_nu(q**-n)`` for ``n >= 0`` from the minimal-solution ratios."""
    if n < 0:
        raise DomainError("the recurrence route covers x = q**-n with n >= 0")
    if anchor is None:
        anchor = macdonald_integral(ctx.qpow(0), ctx)
    ratios = minimal_ratios(ctx, max(n, 1))
    q = ctx.qw
    value = anchor.value
    for i in range(1, n + 1):
        value = value * q**ctx.nuw * ratios[i]
    rel = anchor.est_error / float(abs(anchor.value)) + 4 * (n + 1) * ctx.eps
    err = rel * float(abs(value))
    return MacdonaldEval(_f(ctx.qpow(-n)), value, "recurrence", err, _flag(value, err, ctx))


def macdonald(x, ctx: QContext) -> MacdonaldEval:
    """Best available ``K_nu(x)``.

    ``x <= 1``: decomposition, or the integral route when ``x`` is a lattice
    point and that route reports the smaller error.  Lattice ``x > 1``:
    recurrence route.  Other ``x > 1``: decomposition, flagged when it
    cancels.
    """
    if not x > 0:
        raise DomainError("x must be positive")
    m = lattice_index(x, ctx.q)
    if float(x) <= 1.0:
        dec = macdonald_decomposition(x, ctx)
        if m is not None and m <= 40:
            itg = macdonald_integral(x, ctx)
            return itg if itg.est_error < dec.est_error else dec
        return dec
    if m is not None:
        return macdonald_recurrence(-m, ctx)
    return macdonald_decomposition(x, ctx)


def kv(x, ctx: QContext):
    """Plain value of ``K_nu(x)`` via :func:`macdonald`."""
    return macdonald(x, ctx).value


def _f(x) -> float:
    return float(x)


# --------------------------------------------------------------------------
# decay
# --------------------------------------------------------------------------


def decay_report(ctx: QContext, n_max: int) -> DecayReport:
    """Decay of ``K_nu(q**-n)`` for ``0 <= n <= n_max``.

    Raises
    ------
    PrecisionFloor
        If a value underflows to zero in the working precision.
    """
    if n_max < 10:
        raise DomainError("n_max must be at least 10")
    anchor = macdonald_integral(ctx.qpow(0), ctx)
    ratios_cf = minimal_ratios(ctx, n_max)
    q = ctx.qw
    qn = q**ctx.nuw
    vals = [anchor.value]
    for i in range(1, n_max + 1):
        vals.append(vals[-1] * qn * ratios_cf[i])
    if any(v == 0 for v in vals):
        raise PrecisionFloor("K underflows before n_max; use a wider exponent range")
    ns = np.arange(n_max + 1, dtype=float)
    logs = np.array([float(ctx.arith.log(abs(v))) for v in vals])
    design = np.vstack([ns**2, ns, np.ones_like(ns)]).T
    coef, *_ = np.linalg.lstsq(design, logs, rcond=None)
    a2, b1, c0 = (float(c) for c in coef)
    log_q = math.log(ctx.q)
    cfit = math.exp(b1)
    sigma = max(
        math.exp(logs[i] - i * b1 - i * i * log_q) for i in range(n_max + 1)
    )
    ratios = tuple(float(vals[i] / vals[i - 1]) for i in range(1, n_max + 1))
    scaled = tuple(float(ratios_cf[i]) for i in range(1, n_max + 1))
    signs = {math.copysign(1.0, float(v)) for v in vals[1:]}
    mono = all(abs(ratios[i + 1]) < abs(ratios[i]) for i in range(len(ratios) - 1))
    return DecayReport(
        n=tuple(range(n_max + 1)),
        values=tuple(float(v) for v in vals),
        ratios=ratios,
        scaled_ratios=scaled,
        fitted_sigma=sigma,
        fitted_c=cfit,
        slope_check=a2,
        log_q=log_q,
        constant_sign=len(signs) == 1,
        monotone_ratios=mono,
        fit_coefficients=(a2, b1, c0),
    )
