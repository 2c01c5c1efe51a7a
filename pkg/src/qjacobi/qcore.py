"""q-calculus primitives.

Pochhammer symbols, q-binomials, basic hypergeometric series, the
q-derivative, the q-Bessel operator, the q-Wronskian and Jackson integrals.

Every routine is written against plain Python arithmetic so that the same
code runs on ``float``/``complex`` and, when a :class:`QContext` carries a
``dps`` setting, on mpmath numbers of that precision.  Double precision is
the default; the elevated mode exists for the handful of checks whose
condition number exceeds ``1/eps``.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from typing import Any

from mpmath.ctx_mp import MPContext

from .errors import (
    DivergentIntegral,
    Divergent,
    DomainError,
    MaxTermsExceeded,
)

__all__ = [
    "Arith",
    "QContext",
    "LatticeFunction",
    "SeriesValue",
    "JacksonValue",
    "TruncationRule",
    "qpoch_finite",
    "qpoch_inf",
    "qbinom",
    "rphis",
    "q_derivative",
    "delta_qnu",
    "q_wronskian",
    "wronskian_constant",
    "jackson_0_to_a",
    "jackson_0_to_inf",
    "lattice_index",
]


# --------------------------------------------------------------------------
# working precision
# --------------------------------------------------------------------------


class Arith:
    """Scalar operations for one working precision.

    ``dps=None`` selects IEEE double; an integer selects a private mpmath
    context with that many decimal digits.  A private context keeps
    concurrent callers with different precisions from interfering.
    """

    def __init__(self, dps: int | None = None):
        self.dps = dps
        if dps is None:
            self.mp = None
            self.eps = 2.0**-53
        else:
            self.mp = MPContext()
            self.mp.dps = int(dps)
            self.eps = float(self.mp.eps)

    @property
    def is_mp(self) -> bool:
        return self.mp is not None

    def real(self, x):
        if self.mp is None:
            return float(x)
        return self.mp.mpf(x)

    def cplx(self, x):
        if self.mp is None:
            return complex(x)
        return self.mp.mpc(x)

    def num(self, x):
        """Convert keeping the real/complex distinction."""
        if is_complex(x):
            if x.imag == 0:
                return self.real(x.real)
            return self.cplx(x)
        return self.real(x)

    def sqrt(self, x):
        """Principal square root; complex for negative or complex input."""
        if self.mp is None:
            if isinstance(x, complex) or x < 0:
                return cmath.sqrt(x)
            return math.sqrt(x)
        return self.mp.sqrt(x)

    def log(self, x):
        if self.mp is None:
            return math.log(x)
        return self.mp.log(x)

    def exp(self, x):
        if self.mp is None:
            return math.exp(x)
        return self.mp.exp(x)

    def fsum(self, terms):
        """Correctly rounded (double) or extra-precision (mp) summation."""
        terms = list(terms)
        if self.mp is not None:
            return self.mp.fsum(terms)
        if any(isinstance(t, complex) for t in terms):
            return complex(
                math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms)
            )
        return math.fsum(terms)

    def isfinite(self, x) -> bool:
        if self.mp is None:
            return cmath.isfinite(x)
        return self.mp.isfinite(x)

    def zero(self):
        return self.real(0)

    def one(self):
        return self.real(1)


def is_complex(x) -> bool:
    return isinstance(x, complex) or type(x).__name__ == "mpc"


# --------------------------------------------------------------------------
# context and value types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QContext:
    """Parameters shared by every computation.

    Parameters
    ----------
    q : float
        Lattice base, ``0 < q < 1``.
    nu : float
        Order parameter, ``nu > -1`` and not an integer.
    series_tol : float
        Relative truncation tolerance for series and products.
    max_terms : int
        Hard cap on summation length.
    lattice_lo, lattice_hi : int
        Exponent window for lattice sampling and for the large-argument end
        of Jackson integrals.
    dps : int or None
        Decimal digits of working precision.  ``None`` means IEEE double.
    """

    q: float = 0.5
    nu: float = 0.5
    series_tol: float = 1e-12
    max_terms: int = 10000
    lattice_lo: int = -60
    lattice_hi: int = 120
    dps: int | None = None

    def __post_init__(self):
        if not 0.0 < float(self.q) < 1.0:
            raise DomainError(f"q must lie in (0, 1), got {self.q!r}")
        nu = float(self.nu)
        if not nu > -1.0:
            raise DomainError(f"nu must exceed -1, got {self.nu!r}")
        if abs(nu - round(nu)) < 1e-12:
            raise DomainError(f"nu must not be an integer, got {self.nu!r}")
        if not self.series_tol > 0:
            raise DomainError("series_tol must be positive")
        if int(self.max_terms) < 16:
            raise DomainError("max_terms must be at least 16")
        if not self.lattice_lo <= 0 <= self.lattice_hi:
            raise DomainError("lattice window must contain 0")
        if self.dps is not None and int(self.dps) < 15:
            raise DomainError("dps below 15 is not supported")

    @cached_property
    def arith(self) -> Arith:
        return Arith(self.dps)

    @cached_property
    def qw(self):
        """q in working precision."""
        return self.arith.real(self.q)

    @cached_property
    def nuw(self):
        """nu in working precision."""
        return self.arith.real(self.nu)

    def qpow(self, e):
        """``q**e`` with the exponent applied in one step.

        Integer exponents that cancel to zero therefore give exactly one,
        which keeps lattice products such as ``1 - q**k * q**-k`` exactly
        zero.
        """
        return self.qw**e

    @property
    def eps(self) -> float:
        return self.arith.eps

    def with_order(self, nu) -> QContext:
        """Same context with a different order parameter."""
        return replace(self, nu=nu)

    def elevated(self, dps: int) -> QContext:
        """Copy running at ``dps`` digits with a matching series tolerance.

        The lattice window is widened so that integrands with geometric
        tails can still reach the tighter tolerance.
        """
        dps = int(dps)
        reach = int(math.ceil(dps * math.log(10) / math.log(1 / float(self.q)))) + 20
        return replace(
            self,
            dps=dps,
            series_tol=10.0 ** (-(dps - 3)),
            lattice_lo=min(self.lattice_lo, -reach),
        )

    def in_double(self) -> QContext:
        return replace(self, dps=None, series_tol=max(self.series_tol, 1e-15))


@dataclass(frozen=True)
class SeriesValue:
    """A truncated series or product together with its truncation data."""

    value: Any
    terms_used: int
    tail_bound: float

    def __float__(self) -> float:
        return float(self.value.real if is_complex(self.value) else self.value)

    def __complex__(self) -> complex:
        return complex(self.value)


@dataclass(frozen=True)
class JacksonValue(SeriesValue):
    """Two-sided Jackson sum; the tails at each end are kept separately."""

    tail_small: float = 0.0
    tail_large: float = 0.0
    exponent_range: tuple[int, int] = (0, 0)


class TruncationRule:
    """Stop after ``run`` consecutive small terms once ``index >= min_index``.

    q-series terms can dip before a theta-like factor makes them grow
    again, hence the run length and the minimum index.
    """

    __slots__ = ("tol", "min_index", "run", "_count")

    def __init__(self, tol: float, min_index: int = 8, run: int = 3):
        self.tol = tol
        self.min_index = min_index
        self.run = run
        self._count = 0

    def done(self, index: int, term_abs, total_abs) -> bool:
        if term_abs <= self.tol * total_abs or term_abs == 0:
            self._count += 1
        else:
            self._count = 0
        return index >= self.min_index and self._count >= self.run


# --------------------------------------------------------------------------
# lattice functions
# --------------------------------------------------------------------------


def lattice_index(x, q, rtol: float = 1e-11) -> int | None:
    """Return ``n`` when ``x == q**n`` to relative ``rtol``, else ``None``."""
    if is_complex(x) or not x > 0:
        return None
    t = math.log(float(x)) / math.log(float(q))
    n = round(t)
    if abs(t - n) * abs(math.log(float(q))) <= rtol:
        return int(n)
    return None


@dataclass(frozen=True)
class LatticeFunction:
    """A function on the lattice ``{q**n}``.

    Either a finite table ``samples`` (exponent to value) or a ``rule``
    accepting the point ``x``.  With ``zero_outside`` the table is taken to
    vanish off its exponent range, which is how compactly supported
    functions are expressed.
    """

    q: float
    samples: Mapping[int, Any] | None = None
    rule: Callable[[Any], Any] | None = None
    zero_outside: bool = False
    _keys: tuple[int, int] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if (self.samples is None) == (self.rule is None):
            raise DomainError("give exactly one of samples or rule")
        if self.samples is not None:
            keys = sorted(int(k) for k in self.samples)
            if not keys:
                raise DomainError("empty sample table")
            if keys != list(range(keys[0], keys[-1] + 1)):
                raise DomainError("sample exponents must be contiguous")
            object.__setattr__(self, "_keys", (keys[0], keys[-1]))

    @classmethod
    def from_rule(cls, rule, q) -> LatticeFunction:
        return cls(q=q, rule=rule)

    @classmethod
    def from_samples(cls, samples, q, zero_outside: bool = False) -> LatticeFunction:
        return cls(q=q, samples=dict(samples), zero_outside=zero_outside)

    @property
    def support(self) -> tuple[int, int] | None:
        """Exponent range of the table, ``None`` for rule-based functions."""
        return self._keys

    def at(self, n: int, ctx: QContext | None = None):
        """Value at ``q**n``."""
        if self.samples is not None:
            if n in self.samples:
                return self.samples[n]
            if self.zero_outside:
                return 0.0 if ctx is None else ctx.arith.zero()
            raise DomainError(f"no sample at exponent {n}")
        x = self.q**n if ctx is None else ctx.qpow(n)
        return self.rule(x)

    def __call__(self, x):
        if self.rule is not None:
            return self.rule(x)
        n = lattice_index(x, self.q)
        if n is None:
            raise DomainError(f"{x!r} is not a lattice point")
        return self.at(n)


def _as_callable(f):
    return f if callable(f) else (lambda x: f)


# --------------------------------------------------------------------------
# Pochhammer symbols and series
# --------------------------------------------------------------------------


def qpoch_finite(a, q, n: int):
    """Finite q-Pochhammer symbol ``(a; q)_n``.

    The product is accumulated in ascending factor order.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    p = 1
    qi = 1
    for _ in range(n):
        p = p * (1 - a * qi)
        qi = qi * q
    return p


def qpoch_inf(a, q, ctx: QContext) -> SeriesValue:
    """Infinite q-Pochhammer symbol ``(a; q)_inf``.

    Factors are multiplied until three consecutive ones differ from unity by
    less than the working unit roundoff.
    """
    try:
        return _qpoch_inf_cached(a, q, ctx)
    except TypeError:  # unhashable scalar
        return _qpoch_inf(a, q, ctx)


@lru_cache(maxsize=8192)
def _qpoch_inf_cached(a, q, ctx):
    return _qpoch_inf(a, q, ctx)


def _qpoch_inf(a, q, ctx: QContext) -> SeriesValue:
    if not abs(q) < 1:
        raise DomainError("|q| must be below 1")
    ar = ctx.arith
    thresh = min(ctx.series_tol, ar.eps)
    p = ar.one()
    qi = ar.one()
    run = 0
    i = 0
    while True:
        f = a * qi
        p = p * (1 - f)
        af = abs(f)
        run = run + 1 if af < thresh else 0
        i += 1
        if i >= 8 and run >= 3:
            break
        if i >= ctx.max_terms:
            raise MaxTermsExceeded(f"(a;q)_inf not converged after {i} factors")
        qi = qi * q
    tail = float(abs(a * qi * q)) / (1 - float(abs(q))) * 1.01
    return SeriesValue(p, i, tail * float(abs(p)))


def qbinom(n: int, m: int, q):
    """Gaussian binomial coefficient."""
    if m < 0 or m > n:
        raise DomainError(f"need 0 <= m <= n, got m={m}, n={n}")
    return qpoch_finite(q, q, n) / (qpoch_finite(q, q, m) * qpoch_finite(q, q, n - m))


def _terminating_index(params, q) -> int | None:
    """Smallest ``m`` with some parameter equal to ``q**-m`` (m >= 0)."""
    best = None
    for a in params:
        if is_complex(a) and a.imag != 0:
            continue
        a = a.real if is_complex(a) else a
        if a == 0:
            continue
        if a > 0:
            n = lattice_index(a, q, rtol=1e-9)
            if n is not None and n <= 0:
                best = -n if best is None else min(best, -n)
    return best


def rphis(nums, dens, q, z, ctx: QContext, terminate: int | None = None) -> SeriesValue:
    """Basic hypergeometric series ``r phi s``.

    Parameters
    ----------
    nums, dens : sequences of scalars
        Numerator and denominator parameters.
    q : scalar
        Base of the series.  ``|q| > 1`` is accepted when the series still
        converges (for instance ``r <= s`` with a terminating factor or a
        fast decaying argument).
    z : scalar
        Argument.
    terminate : int, optional
        Known last index of a terminating series; detected automatically
        when a numerator equals ``q**-m``.

    Notes
    -----
    Only non-terminating series with ``1 + s - r == 0`` can diverge for
    ``|q| < 1``; their term ratio tends to ``z``, so ``|z| > 1`` raises
    :class:`Divergent` at once.  For ``|q| > 1`` growth over eight
    consecutive indices is taken as divergence.  Series with ``r <= s``
    are entire in ``z``: the ``q**(k(k-1)/2)`` factor eventually wins, so
    early growth is legitimate.
    """
    nums = list(nums)
    dens = list(dens)
    r, s = len(nums), len(dens)
    power = 1 + s - r
    ar = ctx.arith
    last = terminate if terminate is not None else _terminating_index(nums, q)
    if last is not None:
        for b in dens:
            m = _terminating_index([b], q)
            if m is not None and m < last:
                raise DomainError("denominator parameter vanishes inside the summation range")
    term = ar.one()
    terms = [term]
    if z == 0:
        return SeriesValue(term, 1, 0.0)
    balanced = power == 0 and last is None
    if balanced and abs(q) < 1 and abs(z) > 1:
        raise Divergent("basic hypergeometric series outside |z| < 1")
    stop = TruncationRule(ctx.series_tol)
    running = term
    grow = 0
    prev = abs(term)
    k = 0
    qk = ar.one()
    while True:
        if last is not None and k >= last:
            return SeriesValue(ar.fsum(terms), k + 1, 0.0)
        num = 1
        for a in nums:
            num = num * (1 - a * qk)
        den = 1 - qk * q
        for b in dens:
            den = den * (1 - b * qk)
        if den == 0:
            raise DomainError("zero denominator in basic hypergeometric series")
        term = term * num / den * (-qk) ** power * z
        k += 1
        qk = qk * q
        terms.append(term)
        running = running + term
        at = abs(term)
        if balanced and abs(q) >= 1:
            grow = grow + 1 if at > prev else 0
            if grow >= 8:
                raise Divergent("basic hypergeometric series terms keep growing")
        prev = at
        if stop.done(k, at, abs(running)):
            break
        if k >= ctx.max_terms:
            raise MaxTermsExceeded(f"r phi s not converged after {k} terms")
    value = ar.fsum(terms)
    return SeriesValue(value, k + 1, float(abs(term)) * 2.0)


# --------------------------------------------------------------------------
# difference operators
# --------------------------------------------------------------------------


def q_derivative(f, x, q):
    """Jackson q-derivative ``(f(x) - f(qx)) / ((1 - q) x)``."""
    if x == 0:
        raise DomainError("q-derivative is not defined at 0")
    f = _as_callable(f)
    return (f(x) - f(q * x)) / ((1 - q) * x)


def delta_qnu(f, x, ctx: QContext):
    """q-Bessel operator.

    ``(1/x**2) [f(x/q) - (1 + q**(2 nu)) f(x) + q**(2 nu) f(q x)]``.
    """
    if x == 0:
        raise DomainError("the q-Bessel operator is not defined at 0")
    f = _as_callable(f)
    q = ctx.qw
    q2n = q ** (2 * ctx.nuw)
    return (f(x / q) - (1 + q2n) * f(x) + q2n * f(q * x)) / (x * x)


def q_wronskian(f, h, x, ctx: QContext):
    """q-Wronskian ``q**-2 (1-q)**2 [(L D f)(x) h(x) - (L D h)(x) f(x)]``.

    ``L`` is the inverse dilation ``g(x) -> g(x/q)`` and ``D`` the
    q-derivative, so the value uses samples at ``x/q`` and ``x``.
    """
    q = ctx.qw
    f = _as_callable(f)
    h = _as_callable(h)
    xs = x / q
    dfx = (f(xs) - f(x)) / ((1 - q) * xs)
    dhx = (h(xs) - h(x)) / ((1 - q) * xs)
    return (1 - q) ** 2 / (q * q) * (dfx * h(x) - dhx * f(x))


def wronskian_constant(f, h, x, ctx: QContext):
    """``x**(2 nu) [f(x) h(qx) - f(qx) h(x)]``.

    For two solutions of the same q-Bessel equation this is independent of
    the lattice point.  With ``x' = x q`` it equals
    ``x'**(2 nu + 1) W_x'(f, h) / ((1 - q) q**(2 nu - 1))``, where ``W`` is
    :func:`q_wronskian`.
    """
    q = ctx.qw
    f = _as_callable(f)
    h = _as_callable(h)
    return x ** (2 * ctx.nuw) * (f(x) * h(q * x) - f(q * x) * h(x))


# --------------------------------------------------------------------------
# Jackson integrals
# --------------------------------------------------------------------------


def _sampler(f, ctx: QContext):
    if isinstance(f, LatticeFunction):
        return lambda n: f.at(n, ctx)
    f = _as_callable(f)
    return lambda n: f(ctx.qpow(n))


def jackson_0_to_a(f, a, ctx: QContext) -> SeriesValue:
    """Jackson integral over ``(0, a]``: ``(1-q) a sum_n q**n f(a q**n)``."""
    if not a > 0:
        raise DomainError("upper limit must be positive")
    ar = ctx.arith
    q = ctx.qw
    a = ar.real(a)
    f = _as_callable(f)
    stop = TruncationRule(ctx.series_tol)
    terms = []
    qn = ar.one()
    n = 0
    while True:
        t = qn * f(a * qn)
        terms.append(t)
        n += 1
        if stop.done(n, abs(t), abs(ar.fsum(terms))):
            break
        if n >= ctx.max_terms:
            raise MaxTermsExceeded("Jackson integral did not converge")
        qn = qn * q
    tail = float(abs(terms[-1])) * float(q) / (1 - float(q)) * 2
    return SeriesValue((1 - q) * a * ar.fsum(terms), n, float((1 - q) * a) * tail)


def jackson_0_to_inf(f, ctx: QContext, decay_run: int = 8) -> JacksonValue:
    """Jackson integral over ``(0, inf)`` sampled on ``{q**n : n in Z}``.

    The small-argument end (``n -> +inf``) follows the standard truncation
    rule.  The large-argument end (``n -> -inf``) is only accepted after
    ``decay_run`` strictly decreasing summands that are also negligible;
    reaching ``ctx.lattice_lo`` first raises :class:`DivergentIntegral`.

    Compactly supported :class:`LatticeFunction` tables are summed exactly
    over their support.
    """
    ar = ctx.arith
    q = ctx.qw
    sample = _sampler(f, ctx)
    if isinstance(f, LatticeFunction) and f.zero_outside and f.support is not None:
        lo, hi = f.support
        terms = [ctx.qpow(n) * sample(n) for n in range(lo, hi + 1)]
        return JacksonValue((1 - q) * ar.fsum(terms), len(terms), 0.0, 0.0, 0.0, (lo, hi))

    up = []
    stop = TruncationRule(ctx.series_tol)
    n = 0
    while True:
        t = ctx.qpow(n) * sample(n)
        up.append(t)
        n += 1
        if stop.done(n, abs(t), abs(ar.fsum(up))):
            break
        if n >= ctx.max_terms:
            raise MaxTermsExceeded("Jackson integral: small-argument end did not converge")
    hi = n - 1
    r = _ratio(up)
    tail_small = float(abs(up[-1])) * r / (1 - r)

    down = []
    n = -1
    total = ar.fsum(up)
    mono = 0
    small = 0
    prev = abs(up[0])
    while True:
        if n < ctx.lattice_lo:
            raise DivergentIntegral(
                f"integrand has not decayed by exponent {ctx.lattice_lo}"
            )
        t = ctx.qpow(n) * sample(n)
        down.append(t)
        at = abs(t)
        mono = mono + 1 if at < prev else 0
        prev = at
        if len(down) % 4 == 0:
            total = ar.fsum(up) + ar.fsum(down)
        small = small + 1 if (at <= ctx.series_tol * abs(total) or at == 0) else 0
        if mono >= decay_run and small >= 3:
            break
        if at == 0 and small >= decay_run:
            break
        n -= 1
    lo = n
    r = _ratio(down)
    tail_large = float(abs(down[-1])) * r / (1 - r)
    # ascending exponent order
    terms = list(reversed(down)) + up
    value = (1 - q) * ar.fsum(terms)
    tail = float(1 - q) * (tail_small + tail_large)
    return JacksonValue(
        value,
        len(terms),
        tail,
        float(1 - q) * tail_small,
        float(1 - q) * tail_large,
        (lo, hi),
    )


def _ratio(seq) -> float:
    """Observed geometric ratio of the last summands, capped below one."""
    if len(seq) < 2 or seq[-2] == 0:
        return 0.5
    r = float(abs(seq[-1] / seq[-2]))
    return min(max(r, 0.0), 0.99)
