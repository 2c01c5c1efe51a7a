"""Named verification suites.

Each suite evaluates a family of identities at the parameters of a
:class:`~qjacobi.qcore.QContext` and returns a :class:`VerifyReport`.
A case passes iff its residual does not exceed its tolerance.  Known
misprints are not cases: they are recorded under ``diagnostics`` with the
measured residual so the discrepancy stays visible without masking the
status of the corrected statement.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from . import qbessel as qb
from . import qpoly as qp
from . import qtransform as qt
from .qcore import (
    LatticeFunction,
    QContext,
    delta_qnu,
    jackson_0_to_inf,
    lattice_index,
    wronskian_constant,
)
from .spectral import build_jacobi, carleman_report, solve_recurrence, truncated_spectrum

__all__ = ["Case", "VerifyReport", "SUITES", "run_suite", "eigen_window"]


@dataclass
class Case:
    inputs: dict
    lhs: object
    rhs: object
    residual: float
    tolerance: float
    status: str = ""

    def __post_init__(self):
        if not self.status:
            ok = math.isfinite(self.residual) and self.residual <= self.tolerance
            self.status = "pass" if ok else "fail"


@dataclass
class VerifyReport:
    suite: str
    q: float
    nu: float
    cases: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    @property
    def summary(self) -> dict:
        n_pass = sum(c.status == "pass" for c in self.cases)
        return {"pass": n_pass, "fail": len(self.cases) - n_pass}

    @property
    def ok(self) -> bool:
        return bool(self.cases) and self.summary["fail"] == 0

    @property
    def exit_code_hint(self) -> int:
        return 0 if self.ok else 1

    def worst(self) -> Case | None:
        def ratio(c):
            if c.tolerance > 0:
                return c.residual / c.tolerance
            return math.inf if c.residual > 0 else 0.0

        return max(self.cases, key=ratio, default=None)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "q": self.q,
            "nu": self.nu,
            "cases": [asdict(c) for c in self.cases],
            "diagnostics": self.diagnostics,
            "summary": self.summary,
            "exit_code_hint": self.exit_code_hint,
        }


def _rel(a, b, floor: float = 1e-300) -> float:
    return float(abs(a - b) / max(abs(a), abs(b), floor))


def _num(v):
    if isinstance(v, complex):
        return v
    try:
        return float(v)
    except TypeError:
        return complex(v)


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------


def suite_wronskian(ctx: QContext) -> VerifyReport:
    """Constant q-Wronskians of (j, gamma) and (I, K) over 20 lattice points."""
    rep = VerifyReport("wronskian", ctx.q, ctx.nu)
    k = qt.constants(ctx)
    q = ctx.qw
    target_j = q ** (-2 * ctx.nuw) - 1
    target_k = k.alpha_nu * target_j
    for m in range(-5, 15):
        x = ctx.qpow(m)
        w = wronskian_constant(lambda t: qb.jv(t, ctx), lambda t: qb.gamma_nu(t, ctx), x, ctx)
        rep.cases.append(Case({"pair": "j,gamma", "m": m}, _num(w), _num(target_j), _rel(w, target_j), 1e-8))
        w = wronskian_constant(lambda t: qb.iv(t, ctx), lambda t: qt.kv(t, ctx), x, ctx)
        rep.cases.append(Case({"pair": "I,K", "m": m}, _num(w), _num(target_k), _rel(w, target_k), 1e-6))
    return rep


def eigen_window(ctx: QContext, allowance: float = 1e6) -> range:
    """20 lattice exponents where the operator loses at most ``allowance`` ulps.

    The three-point stencil divided by ``x**2`` amplifies rounding by about
    ``1/x**2`` relative to the eigenvalue term.
    """
    kmax = int(math.floor(math.log(allowance) / (2 * math.log(1 / float(ctx.q)))))
    return range(kmax - 19, kmax + 1)


def suite_eigen(ctx: QContext) -> VerifyReport:
    """``Delta f = -lam**2 f`` for j, gamma and ``+lam**2 f`` for I, pi, K."""
    rep = VerifyReport("eigen", ctx.q, ctx.nu)
    funcs: dict[str, tuple[Callable, int, float]] = {
        "j": (lambda x: qb.jv(x, ctx), -1, 1e-8),
        "gamma": (lambda x: qb.gamma_nu(x, ctx), -1, 1e-8),
        "I": (lambda x: qb.iv(x, ctx), 1, 1e-8),
        "pi": (lambda x: qb.pi_nu(x, ctx), 1, 1e-8),
        "K": (lambda x: qt.kv(x, ctx), 1, 1e-6),
    }
    for name, (f, sign, tol) in funcs.items():
        window = eigen_window(ctx, 1e8 if name == "K" else 1e6)
        for le in (1, 0, -1):
            lam = ctx.qpow(le)
            g = lambda x, f=f, le=le: f(ctx.qpow(lattice_index(x, ctx.q) + le))  # noqa: E731
            for m in window:
                x = ctx.qpow(m)
                lhs = delta_qnu(g, x, ctx)
                rhs = sign * lam * lam * g(x)
                rep.cases.append(Case({"f": name, "lam_exp": le, "m": m}, _num(lhs), _num(rhs), _rel(lhs, rhs), tol))
    return rep


def suite_orthogonality(ctx: QContext) -> VerifyReport:
    """``c**2 int j(q**n x) j(q**m x) x**(2nu+1) d_q x = q**(-2n(nu+1)) / (1-q) delta_nm``."""
    rep = VerifyReport("orthogonality", ctx.q, ctx.nu)
    c = qt.constants(ctx).c_qnu
    nu = ctx.nuw
    q = ctx.qw
    for n in range(-2, 3):
        for m in range(n, 3):
            def integrand(t, n=n, m=m):
                k = lattice_index(t, ctx.q)
                return qb.jv(ctx.qpow(n + k), ctx) * qb.jv(ctx.qpow(m + k), ctx) * t ** (2 * nu + 1)

            val = c * c * jackson_0_to_inf(integrand, ctx).value
            if n == m:
                target = q ** (-2 * n * (nu + 1)) / (1 - q)
                rep.cases.append(Case({"n": n, "m": m}, _num(val), _num(target), _rel(val, target), 1e-7))
            else:
                rep.cases.append(Case({"n": n, "m": m}, _num(val), 0.0, float(abs(val)), 1e-8))
    return rep


def sample_functions(ctx: QContext) -> list[tuple[str, LatticeFunction]]:
    """Five compactly supported lattice functions used by the inversion suite."""
    q = ctx.q
    out = [
        ("indicator[0,3]", {n: 1.0 for n in range(0, 4)}),
        ("ramp[-2,4]", {n: 1.0 + 0.25 * n for n in range(-2, 5)}),
        ("alternating[1,6]", {n: (-1.0) ** n for n in range(1, 7)}),
        ("gauss[-3,5]", {n: math.exp(-0.2 * n * n) for n in range(-3, 6)}),
        ("spike[2,2]", {2: 3.0}),
    ]
    return [(name, LatticeFunction.from_samples(s, q, zero_outside=True)) for name, s in out]


def _transform_callable(f: LatticeFunction, ctx: QContext):
    @lru_cache(maxsize=None)
    def at(k: int):
        return qt.fourier(f, ctx.qpow(k), ctx)

    return lambda t: at(lattice_index(t, ctx.q))


def suite_inversion(ctx: QContext) -> VerifyReport:
    """``F(F f) = f`` on the support and ``||F f|| = ||f||``."""
    rep = VerifyReport("inversion", ctx.q, ctx.nu)
    for name, f in sample_functions(ctx):
        Ff = _transform_callable(f, ctx)
        lo, hi = f.support
        err = 0.0
        scale = max(abs(f.at(n)) for n in range(lo, hi + 1))
        for n in range(lo - 1, hi + 2):
            back = qt.fourier(Ff, ctx.qpow(n), ctx)
            err = max(err, float(abs(back - f.at(n))))
        rep.cases.append(Case({"f": name, "check": "F^2=id"}, err, 0.0, err / scale, 1e-7))
        nf = qt.weighted_norm(f, ctx)
        nF = qt.weighted_norm(Ff, ctx)
        rep.cases.append(Case({"f": name, "check": "norm"}, _num(nF), _num(nf), _rel(nF, nf), 1e-7))
    return rep


def suite_macdonald(ctx: QContext) -> VerifyReport:
    """``F(K)(x) (1 + x**2) = 1`` and agreement of the two routes for ``x <= 1``."""
    rep = VerifyReport("macdonald", ctx.q, ctx.nu)
    for m in (2, 1, 0, -1):
        x = ctx.qpow(m)
        val = qt.fourier(lambda t: qt.kv(t, ctx), x, ctx) * (1 + x * x)
        rep.cases.append(Case({"check": "F(K)(1+x^2)", "m": m}, _num(val), 1.0, _rel(val, 1.0), 1e-6))
    for m in range(0, 9):
        x = ctx.qpow(m)
        a = qt.macdonald_integral(x, ctx)
        b = qt.macdonald_decomposition(x, ctx)
        tol = a.est_error + b.est_error + 4 * ctx.eps * float(abs(a.value))
        diff = float(abs(a.value - b.value))
        rep.cases.append(Case({"check": "integral vs decomposition", "m": m}, _num(a.value), _num(b.value),
                              diff / tol, 1.0))
    return rep


def suite_limits(ctx: QContext) -> VerifyReport:
    """Limit ratio at ``lam = i`` and its behaviour on the two real rays."""
    rep = VerifyReport("limits", ctx.q, ctx.nu)
    beta = qt.constants(ctx).beta_nu
    lr = qb.limit_ratio(1j, ctx, 40)
    rep.cases.append(Case({"lam": "i", "n": 40}, _num(lr.sequence), _num(beta), float(abs(lr.sequence - beta)), 1e-7))
    if lr.closed is not None:
        rep.cases.append(Case({"lam": "i", "check": "closed form"}, _num(lr.closed), _num(beta),
                              float(abs(lr.closed - beta)), 1e-10))
    q = float(ctx.q)
    nu = float(ctx.nu)
    for lam, expect in ((q, "diverges"), (q ** (nu + 1), "vanishes"), (1j, "converges")):
        got = qb.classify_ray(lam, ctx)
        rep.cases.append(Case({"lam": str(lam), "check": "ray"}, got, expect, 0.0 if got == expect else 1.0, 0.0))
    return rep


def suite_decay(ctx: QContext) -> VerifyReport:
    """Fitted ``n**2`` coefficient of ``log K(q**-n)`` against ``log q``."""
    rep = VerifyReport("decay", ctx.q, ctx.nu)
    dr = qt.decay_report(ctx, 12)
    lq = math.log(float(ctx.q))
    rep.cases.append(Case({"check": "n^2 coefficient"}, dr.slope_check, lq, abs(dr.slope_check - lq) / abs(lq), 0.05))
    rep.cases.append(Case({"check": "ratios decreasing"}, dr.monotone_ratios, True, 0.0 if dr.monotone_ratios else 1.0, 0.0))
    last = float(dr.ratios[-1])
    rep.cases.append(Case({"check": "last ratio"}, last, 1e-3, last / 1e-3, 1.0))
    rep.cases.append(Case({"check": "constant sign"}, dr.constant_sign, True, 0.0 if dr.constant_sign else 1.0, 0.0))
    return rep


POLY_POINTS = (0.37, 0.9, 2.2, -2.5, complex(1.5, 0.5))


def genfun_grid(ctx: QContext) -> list[tuple[float, complex]]:
    """3 x 3 grid of ``(x, t)`` inside ``|t| < q**(1+nu)``, off the real poles."""
    g = float(ctx.q) ** (1 + float(ctx.nu))
    ts = [g * r * cmath.exp(0.7j) for r in (0.3, 0.55, 0.8)]
    return [(x, t) for x in (-1.0, 0.5, 2.0) for t in ts]


def suite_polynomials(ctx: QContext) -> VerifyReport:
    """Recurrence, coefficient expansion and explicit sum; generating function."""
    rep = VerifyReport("polynomials", ctx.q, ctx.nu)
    coef = {(m, n): qp.pn_coefficient(m, n, ctx) for n in range(13) for m in range(n + 1)}
    for x in POLY_POINTS:
        for n in range(13):
            rec, _ = qp.pn_eval(x, n, ctx)
            exp_ = qp.pn_explicit(n, x, ctx)
            cf = sum(coef[m, n] * x**m for m in range(n + 1))
            rep.cases.append(Case({"x": str(x), "n": n, "pair": "recurrence/explicit"}, _num(rec), _num(exp_), _rel(rec, exp_), 1e-7))
            rep.cases.append(Case({"x": str(x), "n": n, "pair": "recurrence/coefficients"}, _num(rec), _num(cf), _rel(rec, cf), 1e-7))
    for x, t in genfun_grid(ctx):
        r = qp.genfun_functional_residual(x, t, ctx)
        rep.cases.append(Case({"x": x, "t": str(t), "check": "functional equation"}, r, 0.0, r, 1e-9))
    for n in range(9):
        P, r, res = qp.lommel_dictionary(n, 0.3, ctx)
        rep.cases.append(Case({"n": n, "check": "lommel dictionary"}, _num(P), _num(r), res, 1e-10))
    # misprints, recorded with their residuals
    x = 0.37
    rec, _ = qp.pn_eval(x, 4, ctx)
    rep.diagnostics.append({"what": "explicit sum with q**(m(m-1))", "n": 4, "x": x,
                            "residual": _rel(rec, qp.pn_explicit(4, x, ctx, "printed"))})
    cf = sum(qp.pn_coefficient(m, 4, ctx, "printed") * x**m for m in range(5))
    rep.diagnostics.append({"what": "printed a_{m,n}", "n": 4, "x": x, "residual": _rel(rec, cf)})
    x, t = genfun_grid(ctx)[4]
    rep.diagnostics.append({"what": "printed 2phi2 closed form, functional equation", "x": x, "t": str(t),
                            "residual": qp.genfun_functional_residual(x, t, ctx, "printed")})
    rep.diagnostics.append({"what": "lommel dictionary without reflection", "n": 4,
                            "residual": qp.lommel_dictionary(4, 0.3, ctx, "printed")[2]})
    return rep


def suite_identities(ctx: QContext) -> VerifyReport:
    """Identities a) to f) for ``n <= 10`` and ``lam`` in ``{q**2, q, 1}``."""
    rep = VerifyReport("identities", ctx.q, ctx.nu)
    q = float(ctx.q)
    for which in "abcdef":
        for lam in (q * q, q, 1.0):
            for n in range(11):
                r = qp.identity_check(which, lam, n, ctx)
                rep.cases.append(Case({"which": which, "lam": lam, "n": n, "dps": r.dps},
                                      _num(r.lhs), _num(r.rhs), r.residual, 1e-6))
    return rep


def quadrature_dps(ctx: QContext, degree: int = 8) -> int:
    """Digits that keep ``P_degree`` accurate at the Gauss nodes."""
    return 30 + int(math.ceil(degree * degree * math.log10(1 / float(ctx.q))))


def suite_quadrature(ctx: QContext) -> VerifyReport:
    """Gauss rule of the 60-section: orthonormality, low moments, Carleman growth.

    ``P_m`` at the nodes amplifies node errors by roughly ``q**(-m**2)``, so
    the rule is polished at :func:`quadrature_dps` digits before the
    polynomials are evaluated.
    """
    rep = VerifyReport("quadrature", ctx.q, ctx.nu)
    N = 60
    dps = quadrature_dps(ctx)
    J = build_jacobi("zero", ctx, N)
    Jh = build_jacobi("zero", ctx.elevated(dps), N)
    tsh = truncated_spectrum(Jh, N, refine_dps=dps)
    Pv = [solve_recurrence(Jh, t, 8, "first_kind") for t in tsh.nodes]
    for m in range(9):
        for n in range(m, 9):
            g = float(sum(w * P[m] * P[n] for w, P in zip(tsh.weights, Pv)))
            target = 1.0 if m == n else 0.0
            rep.cases.append(Case({"m": m, "n": n}, g, target, abs(g - target), 1e-7))
    ts = truncated_spectrum(J, N)
    a0, b0 = float(J.a[0]), float(J.b[0])
    for k, target in ((0, 1.0), (1, b0), (2, a0 * a0 + b0 * b0)):
        mk = ts.moment(k)
        rep.cases.append(Case({"moment": k}, mk, target, abs(mk - target), 1e-10))
    cr = carleman_report(J, 30)
    target = float(ctx.q) ** -2
    rep.cases.append(Case({"check": "Carleman increment ratio"}, cr.growth_ratio, target,
                          _rel(cr.growth_ratio, target), 1e-10))
    return rep


STIELTJES_Z = (-5.0, -2.3, 0.5, 2.0, complex(-0.7, 0.3))


def suite_stieltjes(ctx: QContext) -> VerifyReport:
    """``lim Q_n/P_n`` against the Gauss resolvent and the closed form."""
    rep = VerifyReport("stieltjes", ctx.q, ctx.nu)
    J = build_jacobi("zero", ctx, 60)
    ts = truncated_spectrum(J, 60)
    for z in STIELTJES_Z:
        lim = qp.stieltjes_limit(z, ctx)
        quad = ts.resolvent(z)
        rep.cases.append(Case({"z": str(z), "pair": "limit/quadrature"}, _num(lim), quad, _rel(lim, quad), 1e-6))
        closed = qp.stieltjes_closed(z, ctx)
        rep.cases.append(Case({"z": str(z), "pair": "limit/closed"}, _num(lim), _num(closed), _rel(lim, closed), 1e-9))
        try:
            printed = qp.stieltjes_closed(z, ctx, form="printed")
            res = _rel(lim, printed)
        except Exception as exc:  # noqa: BLE001 - the printed form may hit its own poles
            printed, res = repr(exc), math.inf
        rep.diagnostics.append({"what": "printed closed form", "z": str(z), "limit": str(_num(lim)),
                                "printed": str(_num(printed)) if not isinstance(printed, str) else printed,
                                "residual": res})
    # lattice branches of the closed form
    for m in (0, 1, 2):
        z = -float(ctx.q) ** (2 * m)
        lim = qp.stieltjes_limit(z, ctx)
        closed = qp.stieltjes_closed(z, ctx)
        rep.cases.append(Case({"z": z, "pair": "limit/closed (lattice branch)"}, _num(lim), _num(closed), _rel(lim, closed), 1e-9))
        z = -(float(ctx.q) ** (2 * m + 2 * float(ctx.nu)))
        lim = qp.stieltjes_limit(z, ctx)
        closed = qp.stieltjes_closed(z, ctx)
        rep.cases.append(Case({"z": z, "pair": "limit/closed (q^nu branch)"}, _num(lim), _num(closed), _rel(lim, closed), 1e-9))
    return rep


def suite_measure(ctx: QContext) -> VerifyReport:
    """Measure from the closed form versus the Gauss rule; printed formula diagnostics."""
    rep = VerifyReport("measure", ctx.q, ctx.nu)
    k_max = 6
    cf = qp.measure(ctx, k_max, "closed_form")
    qd = qp.measure(ctx, k_max, "quadrature", N=60)
    for k in range(k_max):
        rep.cases.append(Case({"k": k, "check": "support"}, float(cf.support[k]), float(qd.support[k]),
                              _rel(cf.support[k], qd.support[k]), 1e-8))
        rep.cases.append(Case({"k": k, "check": "mass"}, float(cf.masses[k]), float(qd.masses[k]),
                              _rel(cf.masses[k], qd.masses[k]), 1e-6))
    J = build_jacobi("zero", ctx, 60)
    total = truncated_spectrum(J, 60).weights.sum()
    rep.cases.append(Case({"check": "quadrature total mass"}, float(total), 1.0, abs(total - 1.0), 1e-10))
    pf = qp.measure(ctx, 3, "printed_formula")
    rep.diagnostics.append({
        "what": "printed support q**-2 j_k**2 and printed masses",
        "support": [float(v) for v in pf.support],
        "masses": [float(v) for v in pf.masses],
        "actual_support": [float(v) for v in cf.support[:3]],
        "actual_masses": [float(v) for v in cf.masses[:3]],
    })
    return rep


def suite_alsalam(ctx: QContext) -> VerifyReport:
    """Scaling link between ``R_n`` and the centrifugal family; parity."""
    rep = VerifyReport("alsalam", ctx.q, ctx.nu)
    for x in (0.7, -1.3, 2.5):
        for n in range(13):
            R, rhs, res = qp.al_salam_ismail_relation(n, x, ctx)
            rep.cases.append(Case({"x": x, "n": n, "check": "scaling"}, _num(R), _num(rhs), res, 1e-8))
            Rm = qp.al_salam_ismail(n, -x, ctx)
            par = _rel(Rm, (-1) ** n * R)
            rep.cases.append(Case({"x": x, "n": n, "check": "parity"}, _num(Rm), _num((-1) ** n * R), par, 4 * ctx.eps))
    for n in (2, 4, 8):
        rep.diagnostics.append({"what": "printed scaling q**(n-n^2) P(q**-(1+nu) x)", "n": n, "x": 0.7,
                                "residual": qp.al_salam_ismail_relation(n, 0.7, ctx, "printed")[2]})
    return rep


SUITES: dict[str, Callable[[QContext], VerifyReport]] = {
    "wronskian": suite_wronskian,
    "eigen": suite_eigen,
    "orthogonality": suite_orthogonality,
    "inversion": suite_inversion,
    "macdonald": suite_macdonald,
    "limits": suite_limits,
    "decay": suite_decay,
    "polynomials": suite_polynomials,
    "identities": suite_identities,
    "quadrature": suite_quadrature,
    "stieltjes": suite_stieltjes,
    "measure": suite_measure,
    "alsalam": suite_alsalam,
}


def run_suite(name: str, ctx: QContext) -> VerifyReport:
    """Run one suite by name; ``KeyError`` for unknown names."""
    return SUITES[name](ctx)
