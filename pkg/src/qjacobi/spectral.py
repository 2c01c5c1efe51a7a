"""Jacobi operators obtained from q-difference equations.

Substituting ``x = q**-n`` and ``f(x) = x**-(nu+1) g(x)`` in
``Delta_{q,nu} f - V f = lam f`` gives the symmetric three-term recurrence

    a_n g_{n+1} + b_n g_n + a_{n-1} g_{n-1} = lam g_n,
    a_n = q**(2n + nu + 1),   b_n = -q**(2n) (1 + q**(2nu)) - V(q**-n).

This module builds those coefficients, runs the recurrence, reports the
Carleman sum and computes Gauss rules of finite sections.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import mpmath
import numpy as np
from scipy.linalg import solve_banded

from .errors import ConvergenceFailure, DomainError, RecurrenceOverflow
from .qcore import QContext

__all__ = [
    "PotentialKind",
    "PotentialSpec",
    "JacobiCoeffs",
    "TruncatedSpectrum",
    "CarlemanReport",
    "build_jacobi",
    "carleman_sum",
    "carleman_report",
    "solve_recurrence",
    "sturm_count",
    "truncated_spectrum",
    "christoffel_darboux",
]


class PotentialKind(str, Enum):
    zero = "zero"
    centrifugal = "centrifugal"
    custom = "custom"


@dataclass(frozen=True)
class PotentialSpec:
    """Potential ``V`` in ``Delta_{q,nu} f - V f``.

    ``centrifugal`` is ``V(t) = -(1 + q**(2nu)) / t**2``; ``custom`` takes
    any callable of the point ``t`` (a lattice function qualifies).
    """

    kind: PotentialKind = PotentialKind.zero
    func: Callable | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        if self.kind is PotentialKind.custom and self.func is None:
            raise DomainError("custom potential needs a function")

    def value(self, t, ctx: QContext):
        if self.kind is PotentialKind.zero:
            return ctx.arith.zero()
        if self.kind is PotentialKind.centrifugal:
            return -(1 + ctx.qw ** (2 * ctx.nuw)) / (t * t)
        return self.func(t)


@dataclass(frozen=True)
class JacobiCoeffs:
    """Recurrence coefficients ``a_n`` (``n < n_max``) and ``b_n`` (``n <= n_max``).

    ``a_prev`` is the value used for ``a_{-1}`` when second-kind solutions
    are started from ``Q_{-1} = -1``.  The standard choice is 1, which makes
    the Christoffel-Darboux constant equal to -1; the natural continuation
    of ``a_n = q**(2n+nu+1)`` to ``n = -1`` is ``q**(nu-1)``.
    """

    a: tuple
    b: tuple
    n_max: int
    a_prev: object = 1.0

    def __post_init__(self):
        if len(self.a) != self.n_max or len(self.b) != self.n_max + 1:
            raise DomainError("coefficient lengths do not match n_max")
        if any(not a > 0 for a in self.a):
            raise DomainError("off-diagonal coefficients must be positive")

    def with_a_prev(self, a_prev) -> JacobiCoeffs:
        return JacobiCoeffs(self.a, self.b, self.n_max, a_prev)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Double precision copies as numpy arrays."""
        return np.array([float(a) for a in self.a]), np.array([float(b) for b in self.b])


@dataclass(frozen=True)
class TruncatedSpectrum:
    """Gauss rule of the leading ``N x N`` section.

    ``dps`` is ``None`` for double precision arrays; after refinement the
    arrays hold mpmath numbers carrying ``dps`` digits.
    """

    nodes: np.ndarray
    weights: np.ndarray
    N: int
    dps: int | None = None

    def moment(self, k: int) -> float:
        return float(np.sum(self.weights * self.nodes**k))

    def resolvent(self, z):
        """``sum_k w_k / (z - t_k)``."""
        return complex(np.sum(self.weights / (z - self.nodes)))


@dataclass(frozen=True)
class CarlemanReport:
    partial_sums: tuple
    growth_ratio: float


def build_jacobi(V: PotentialSpec | str, ctx: QContext, n_max: int) -> JacobiCoeffs:
    """Coefficients of the Jacobi operator for potential ``V``.

    Examples
    --------
    >>> from qjacobi.qcore import QContext
    >>> J = build_jacobi("zero", QContext(q=0.5, nu=0.5), 4)
    >>> round(float(J.a[0]), 6), float(J.b[0])
    (0.353553, -1.5)
    """
    if n_max < 2:
        raise DomainError("n_max must be at least 2")
    if not isinstance(V, PotentialSpec):
        V = PotentialSpec(V)
    nu = ctx.nuw
    q = ctx.qw
    q2nu = q ** (2 * nu)
    a = tuple(q ** (2 * n + nu + 1) for n in range(n_max))
    b = []
    for n in range(n_max + 1):
        bn = -ctx.qpow(2 * n) * (1 + q2nu) - V.value(ctx.qpow(-n), ctx)
        if V.kind is PotentialKind.centrifugal:
            bn = ctx.arith.zero()  # exact cancellation
        b.append(bn)
    return JacobiCoeffs(a, tuple(b), n_max, ctx.arith.one())


def carleman_sum(coeffs: JacobiCoeffs, N: int):
    """``sum_{n<N} 1/a_n``; divergence as ``N`` grows means determinacy."""
    if N > coeffs.n_max:
        raise DomainError("N exceeds the available coefficients")
    s = 0
    for n in range(N):
        s = s + 1 / coeffs.a[n]
    return s


def carleman_report(coeffs: JacobiCoeffs, N: int) -> CarlemanReport:
    """Partial Carleman sums and the observed ratio of consecutive increments."""
    sums = [float(carleman_sum(coeffs, k)) for k in range(1, N + 1)]
    inc = np.diff([0.0] + sums)
    ratio = float(inc[-1] / inc[-2]) if len(inc) >= 2 else math.nan
    return CarlemanReport(tuple(sums), ratio)


def solve_recurrence(
    coeffs: JacobiCoeffs,
    lam,
    n_max: int,
    init: str = "first_kind",
    scaled_by=None,
):
    """Forward solution of ``a_n y_{n+1} = (lam - b_n) y_n - a_{n-1} y_{n-1}``.

    Parameters
    ----------
    init : {"first_kind", "second_kind"}
        ``(y_{-1}, y_0) = (0, 1)`` or ``(-1, 0)``; the second kind uses
        ``coeffs.a_prev`` for ``a_{-1}``.
    scaled_by : scalar, optional
        When given, returns ``s_n = scaled_by**n * y_n`` computed without
        forming ``y_n`` (pass ``q**(nu+1)`` for the bounded normalization of
        lattice eigenfunctions).

    Returns
    -------
    list
        ``y_0 .. y_{n_max}``.

    Raises
    ------
    RecurrenceOverflow
        When an unscaled double precision value stops being finite.
    """
    if n_max > coeffs.n_max:
        raise DomainError("n_max exceeds the available coefficients")
    if init == "first_kind":
        prev, cur = 0, 1
    elif init == "second_kind":
        prev, cur = -1, 0
    else:
        raise DomainError(f"unknown init {init!r}")
    s = 1 if scaled_by is None else scaled_by
    if scaled_by is not None:
        prev = prev / s  # s_{-1} = y_{-1} / s
    # scaled: s_{n+1} = s [(lam-b_n) s_n - a_{n-1} s s_{n-1}] / a_n
    out = [cur]
    for n in range(n_max):
        a_nm1 = coeffs.a_prev if n == 0 else coeffs.a[n - 1]
        if scaled_by is None:
            nxt = ((lam - coeffs.b[n]) * cur - a_nm1 * prev) / coeffs.a[n]
        else:
            nxt = s * ((lam - coeffs.b[n]) * cur - a_nm1 * s * prev) / coeffs.a[n]
        prev, cur = cur, nxt
        out.append(cur)
        if isinstance(cur, (float, complex)) and not math.isfinite(abs(cur)):
            raise RecurrenceOverflow(f"recurrence overflowed at n={n + 1}")
    return out


def christoffel_darboux(coeffs: JacobiCoeffs, lam, n_max: int, dps: int | None = None):
    """``a_n [P_{n+1} Q_n - P_n Q_{n+1}]`` for ``n = 0 .. n_max-1``.

    Both products grow like ``prod_k a_k**-2`` while their difference stays
    of order one, so the recurrence runs in mpmath with enough digits to
    absorb the cancellation.  The coefficients are converted exactly, so the
    exact answer is the constant ``-a_prev``.

    Returns
    -------
    list of float
    """
    if dps is None:
        lost = sum(2 * max(0.0, -math.log10(float(a))) for a in coeffs.a[:n_max])
        lost += 2 * n_max * max(0.0, math.log10(abs(complex(lam)) + 1.0))
        dps = 25 + int(math.ceil(lost))
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    conv = (lambda v: ctx.mpf(v)) if not isinstance(lam, complex) else (lambda v: ctx.mpc(v))
    hp = JacobiCoeffs(
        tuple(ctx.mpf(a) for a in coeffs.a),
        tuple(ctx.mpf(b) for b in coeffs.b),
        coeffs.n_max,
        ctx.mpf(coeffs.a_prev),
    )
    lam_hp = conv(lam)
    P = solve_recurrence(hp, lam_hp, n_max, "first_kind")
    Q = solve_recurrence(hp, lam_hp, n_max, "second_kind")
    vals = [hp.a[n] * (P[n + 1] * Q[n] - P[n] * Q[n + 1]) for n in range(n_max)]
    return [complex(v) if isinstance(lam, complex) else float(v) for v in vals]


# --------------------------------------------------------------------------
# finite sections
# --------------------------------------------------------------------------


def sturm_count(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Number of eigenvalues below each entry of ``x``.

    Counts negative pivots of the LDL^T factorization of ``T - x I``;
    vectorized over ``x``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    tiny = np.finfo(float).tiny
    d = b[0] - x
    d = np.where(d == 0.0, -tiny, d)
    count = (d < 0).astype(int)
    for i in range(1, len(b)):
        d = (b[i] - x) - a[i - 1] ** 2 / d
        d = np.where(d == 0.0, -tiny, d)
        count += d < 0
    return count


def _bisect_all(a, b, rtol=1e-15, max_iter=4000):
    N = len(b)
    # Gershgorin interval
    off = np.zeros(N)
    off[:-1] += a
    off[1:] += a
    lo = float(np.min(b - off))
    hi = float(np.max(b + off))
    span = hi - lo
    lo -= 1e-12 * span + 1e-300
    hi += 1e-12 * span + 1e-300
    L = np.full(N, lo)
    U = np.full(N, hi)
    k = np.arange(N)
    for _ in range(max_iter):
        width = U - L
        mid = 0.5 * (L + U)
        scale = np.maximum(np.abs(L), np.abs(U))
        active = width > rtol * scale + 1e-300
        if not np.any(active):
            break
        c = sturm_count(a, b, mid[active])
        idx = np.nonzero(active)[0]
        below = c > k[idx]
        U[idx[below]] = mid[active][below]
        L[idx[~below]] = mid[active][~below]
    else:
        raise ConvergenceFailure("bisection did not separate the eigenvalues")
    return 0.5 * (L + U)


def _inverse_iteration(a, b, lam, steps=3):
    N = len(b)
    ab = np.zeros((3, N))
    ab[0, 1:] = a
    ab[2, :-1] = a
    v = np.ones(N) / math.sqrt(N)
    scale = max(abs(lam), np.max(np.abs(b)), np.max(a) if len(a) else 0.0)
    # nudge off the node so the factorization stays nonsingular
    shift = lam + 4 * np.finfo(float).eps * max(abs(lam), 1e-300)
    for _ in range(steps):
        ab[1] = b - shift
        w = solve_banded((1, 1), ab, v, check_finite=False)
        nrm = np.linalg.norm(w)
        if not np.isfinite(nrm) or nrm == 0:
            shift = shift + 1e-14 * scale
            continue
        v = w / nrm
    return v


def _thomas(a, b, shift, rhs, mpc):
    """Solve ``(T - shift) x = rhs`` for symmetric tridiagonal ``T``."""
    N = len(b)
    c = [mpc.zero] * N
    d = [mpc.zero] * N
    piv = b[0] - shift
    if piv == 0:
        piv = mpc.eps
    c[0] = a[0] / piv if N > 1 else mpc.zero
    d[0] = rhs[0] / piv
    for i in range(1, N):
        piv = (b[i] - shift) - a[i - 1] * c[i - 1]
        if piv == 0:
            piv = mpc.eps
        c[i] = a[i] / piv if i < N - 1 else mpc.zero
        d[i] = (rhs[i] - a[i - 1] * d[i - 1]) / piv
    x = [mpc.zero] * N
    x[-1] = d[-1]
    for i in range(N - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def _refine(a, b, nodes, dps: int, max_iter: int = 6):
    """Rayleigh quotient iteration in mpmath started from double nodes."""
    mpc = mpmath.mp.clone()
    mpc.dps = dps
    A = [mpc.mpf(v) for v in a]
    B = [mpc.mpf(v) for v in b]
    N = len(B)
    tol = mpc.mpf(10) ** (-(dps - 5))
    out_nodes, out_w = [], []
    for lam in nodes:
        sigma = mpc.mpf(lam)
        v = [mpc.one] * N
        for it in range(max_iter):
            w = _thomas(A, B, sigma, v, mpc)
            nrm = mpc.sqrt(mpc.fsum(x * x for x in w))
            v = [x / nrm for x in w]
            Tv = [B[i] * v[i] + (A[i - 1] * v[i - 1] if i > 0 else 0) + (A[i] * v[i + 1] if i < N - 1 else 0)
                  for i in range(N)]
            new = mpc.fsum(v[i] * Tv[i] for i in range(N))
            done = abs(new - sigma) <= tol * abs(new) and it >= 1
            sigma = new
            if done:
                break
        out_nodes.append(sigma)
        out_w.append(v[0] * v[0])
    return np.array(out_nodes, dtype=object), np.array(out_w, dtype=object)


def truncated_spectrum(coeffs: JacobiCoeffs, N: int, refine_dps: int | None = None) -> TruncatedSpectrum:
    """Gauss rule of the leading ``N x N`` section of the Jacobi matrix.

    Nodes come from Sturm-sequence bisection to relative width ``1e-15``;
    weights are squared first components of eigenvectors obtained by a few
    steps of shifted inverse iteration with a banded solver.

    Parameters
    ----------
    refine_dps : int, optional
        Polish every node and weight by Rayleigh quotient iteration at this
        many digits, using the coefficients as stored (exactly, when they
        are mpmath numbers).  Needed when polynomials of moderate degree
        are evaluated at the nodes: ``P_n`` grows like ``prod 1/a_k`` and
        turns a node error of one ulp into an error of that size.
    """
    if not 1 <= N <= coeffs.n_max + 1:
        raise DomainError("N must lie in [1, n_max + 1]")
    a, b = coeffs.arrays()
    a = a[: N - 1]
    b = b[:N]
    if N == 1:
        return TruncatedSpectrum(np.array([b[0]]), np.array([1.0]), 1)
    nodes = _bisect_all(a, b)
    if np.any(np.diff(nodes) <= 0):
        raise ConvergenceFailure("eigenvalues not separated")
    if refine_dps is not None:
        rn, rw = _refine(coeffs.a[: N - 1], coeffs.b[:N], nodes, int(refine_dps))
        return TruncatedSpectrum(rn, rw, N, int(refine_dps))
    weights = np.empty(N)
    for i, lam in enumerate(nodes):
        v = _inverse_iteration(a, b, lam)
        weights[i] = v[0] ** 2
    return TruncatedSpectrum(nodes, weights, N)
