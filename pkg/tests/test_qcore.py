import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qjacobi import qbessel as qb
from qjacobi.errors import DivergentIntegral, DomainError, MaxTermsExceeded
from qjacobi.qcore import (
    LatticeFunction,
    QContext,
    delta_qnu,
    jackson_0_to_a,
    jackson_0_to_inf,
    lattice_index,
    q_derivative,
    q_wronskian,
    qbinom,
    qpoch_finite,
    qpoch_inf,
    rphis,
    wronskian_constant,
)

import oracle

qs = st.floats(0.2, 0.9)
small = st.floats(-1.0, 1.0)


class TestContext:
    @pytest.mark.parametrize(
        "kw",
        [{"q": 0.0}, {"q": 1.0}, {"q": -0.3}, {"nu": -1.0}, {"nu": 2.0}, {"nu": -1.5},
         {"series_tol": 0.0}, {"max_terms": 3}, {"lattice_lo": 1}, {"dps": 10}],
    )
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            QContext(**kw)

    def test_defaults(self):
        c = QContext()
        assert (c.q, c.nu, c.series_tol, c.max_terms) == (0.5, 0.5, 1e-12, 10000)
        assert (c.lattice_lo, c.lattice_hi) == (-60, 120)

    def test_elevated_widens_window_and_tightens_tolerance(self):
        c = QContext().elevated(40)
        assert c.dps == 40 and c.series_tol == pytest.approx(1e-37)
        assert c.lattice_lo <= -int(40 * math.log(10) / math.log(2))
        assert c.in_double().dps is None

    def test_qpow_integer_exponents_cancel_exactly(self):
        c = QContext(q=0.7)
        assert 1 - c.qpow(5) * c.qpow(-5) == pytest.approx(0, abs=1e-16)

    def test_lattice_index(self):
        assert lattice_index(0.125, 0.5) == 3
        assert lattice_index(8.0, 0.5) == -3
        assert lattice_index(0.3, 0.5) is None
        assert lattice_index(-1.0, 0.5) is None


class TestPochhammer:
    def test_examples(self):
        assert qpoch_finite(0.7, 0.5, 0) == 1
        assert qpoch_finite(0.5, 0.5, 1) == 0.5
        assert qpoch_finite(0.5, 0.5, 3) == 0.328125
        assert float(qpoch_inf(0.0, 0.5, QContext()).value) == 1.0
        assert float(qpoch_inf(0.5, 0.5, QContext()).value) == pytest.approx(0.28878809508660242128, rel=1e-15)

    def test_inf_against_oracle(self):
        c = QContext(q=0.7)
        v = qpoch_inf(0.3, 0.7, c)
        assert float(v.value) == pytest.approx(float(oracle.qpoch(0.3, 0.7)), rel=1e-14)
        assert v.tail_bound < 1e-14

    def test_negative_n(self):
        with pytest.raises(DomainError):
            qpoch_finite(0.5, 0.5, -1)

    def test_max_terms(self):
        with pytest.raises(MaxTermsExceeded):
            qpoch_inf(0.5, 0.999, QContext(max_terms=16))

    def test_qbinom(self):
        assert qbinom(5, 0, 0.3) == pytest.approx(1)
        assert qbinom(5, 5, 0.3) == pytest.approx(1)
        assert qbinom(2, 1, 0.5) == pytest.approx(1.5)
        with pytest.raises(DomainError):
            qbinom(2, 3, 0.5)

    @given(a=small, q=qs, n=st.integers(0, 30))
    def test_product_split(self, a, q, n):
        c = QContext(q=q)
        lhs = qpoch_finite(a, q, n) * qpoch_inf(a * q**n, q, c).value
        rhs = qpoch_inf(a, q, c).value
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-14)

    @given(a=small, z=st.floats(-0.9, 0.9), q=qs)
    @settings(max_examples=60)
    def test_q_binomial_theorem(self, a, z, q):
        c = QContext(q=q)
        pz = qpoch_inf(z, q, c).value
        lhs = rphis([a], [], q, z, c).value * pz
        rhs = qpoch_inf(a * z, q, c).value
        # sum |terms| <= (-|a z|; q)_inf / (|z|; q)_inf bounds the rounding error
        abs_sum = qpoch_inf(-abs(a * z), q, c).value / qpoch_inf(abs(z), q, c).value
        assert abs(lhs - rhs) <= 1e-9 * abs(rhs) + 1e-14 * abs_sum * abs(pz)


class TestBasicHypergeometric:
    def test_zero_argument(self):
        assert rphis([0.3, 0.2], [0.6], 0.5, 0.0, QContext()).value == 1

    def test_q_binomial_example(self):
        c = QContext(q=0.25)
        q, a, z = 0.25, 0.25**4, 0.2
        v = rphis([a], [], q, z, c).value
        assert v == pytest.approx(qpoch_inf(a * z, q, c).value / qpoch_inf(z, q, c).value, rel=1e-13)

    def test_terminating(self):
        # base q**2 = 0.25 with numerator q**(-2m), m = 3
        q = 0.25
        v = rphis([q**-3, 0.3], [0.7], q, 0.4, QContext())
        assert v.terms_used == 4 and v.tail_bound == 0.0
        exact = mp.fsum(
            oracle.qpoch(q**-3, q, k) * oracle.qpoch(0.3, q, k) / (oracle.qpoch(q, q, k) * oracle.qpoch(0.7, q, k)) * mp.mpf(0.4) ** k
            for k in range(4)
        )
        assert v.value == pytest.approx(float(exact), rel=1e-14)

    def test_vanishing_denominator(self):
        with pytest.raises(DomainError):
            rphis([0.5**-6], [0.5**-2], 0.5, 0.3, QContext())


class TestOperators:
    def test_q_derivative_examples(self):
        assert q_derivative(lambda x: 3.0, 0.7, 0.5) == 0
        assert q_derivative(lambda x: x, 0.7, 0.5) == pytest.approx(1)
        assert q_derivative(lambda x: x * x, 1.0, 0.5) == pytest.approx(1.5)
        with pytest.raises(DomainError):
            q_derivative(lambda x: x, 0.0, 0.5)

    @given(q=qs, x=st.floats(0.1, 4), c0=st.floats(-2, 2), c1=st.floats(-2, 2), c2=st.floats(-2, 2))
    def test_product_rule(self, q, x, c0, c1, c2):
        f = lambda t: c0 + c1 * t + c2 * t**3  # noqa: E731
        lhs = q_derivative(lambda t: t * f(t), x, q)
        rhs = f(q * x) + x * q_derivative(f, x, q)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_delta_kills_constants(self, ctx):
        assert delta_qnu(lambda x: 2.5, 0.8, ctx) == pytest.approx(0, abs=1e-14)

    def test_delta_eigen_j(self, ctx):
        for lam in (ctx.q, 1.0):
            for m in range(-3, 6):
                x = ctx.q**m
                lhs = delta_qnu(lambda t: qb.jv(lam * t, ctx), x, ctx)
                rhs = -lam * lam * qb.jv(lam * x, ctx)
                assert abs(lhs - rhs) <= 1e-9 * max(abs(rhs), lam * lam * abs(qb.jv(lam * x / ctx.q, ctx)) / x / x * ctx.q**2)

    def test_delta_eigen_i(self, ctx):
        for m in range(-3, 6):
            x = ctx.q**m
            lhs = delta_qnu(lambda t: qb.iv(t, ctx), x, ctx)
            assert lhs == pytest.approx(qb.iv(x, ctx), rel=1e-9)

    def test_wronskian_antisymmetric(self, ctx):
        f = lambda t: qb.jv(t, ctx)  # noqa: E731
        assert q_wronskian(f, f, 0.5, ctx) == 0

    def test_wronskian_constant_j_gamma(self):
        c = QContext()
        vals = [wronskian_constant(lambda t: qb.jv(t, c), lambda t: qb.gamma_nu(t, c), 0.5**m, c) for m in range(-4, 16)]
        mean = sum(vals) / len(vals)
        assert mean == pytest.approx(1.0, rel=1e-12)
        sd = math.sqrt(sum((v - mean) ** 2 for v in vals) / len(vals))
        assert sd < 1e-9 * abs(mean)

    def test_wronskian_forms_agree(self, ctx):
        f = lambda t: qb.jv(t, ctx)  # noqa: E731
        h = lambda t: qb.gamma_nu(t, ctx)  # noqa: E731
        q, nu = ctx.q, ctx.nu
        for m in (0, 2, 5):
            x = q**m
            w = q_wronskian(f, h, x * q, ctx)
            expect = (x * q) ** (2 * nu + 1) * w / ((1 - q) * q ** (2 * nu - 1))
            assert wronskian_constant(f, h, x, ctx) == pytest.approx(expect, rel=1e-12)


class TestJackson:
    def test_examples(self):
        c = QContext()
        assert jackson_0_to_a(lambda x: 1.0, 1.0, c).value == pytest.approx(1.0, rel=1e-12)
        assert jackson_0_to_a(lambda x: x, 1.0, c).value == pytest.approx(2 / 3, rel=1e-12)
        with pytest.raises(DomainError):
            jackson_0_to_a(lambda x: x, 0.0, c)

    def test_finite_support_exact(self):
        c = QContext()
        f = LatticeFunction.from_samples({0: 2.0, 1: 3.0}, 0.5, zero_outside=True)
        v = jackson_0_to_inf(f, c)
        assert v.value == 0.5 * (2.0 + 0.5 * 3.0)
        assert v.tail_bound == 0.0

    def test_polynomial_decay_at_infinity_is_accepted(self, ctx):
        nu = ctx.nu
        v = jackson_0_to_inf(lambda t: t ** (2 * nu + 1) / (1 + t * t) ** 2, ctx)
        assert math.isfinite(v.value) and v.value > 0

    def test_divergent_integrand(self):
        with pytest.raises(DivergentIntegral):
            jackson_0_to_inf(lambda t: t, QContext())

    @pytest.mark.parametrize("n", range(-2, 3))
    @pytest.mark.parametrize("m", range(-2, 3))
    def test_orthogonality(self, ctx, n, m):
        from qjacobi.qtransform import c_qnu

        q, nu = ctx.q, ctx.nu
        c = c_qnu(ctx)
        v = jackson_0_to_inf(lambda t: qb.jv(q**n * t, ctx) * qb.jv(q**m * t, ctx) * t ** (2 * nu + 1), ctx).value
        target = q ** (-2 * n * (nu + 1)) / (1 - q) if n == m else 0.0
        if n == m:
            assert c * c * v == pytest.approx(target, rel=1e-7)
        else:
            assert abs(c * c * v) < 1e-8

    @given(
        vals=st.lists(st.floats(0, 10), min_size=1, max_size=8),
        other=st.lists(st.floats(-10, 10), min_size=8, max_size=8),
        lo=st.integers(-4, 4),
        a=st.floats(-3, 3),
    )
    def test_linear_and_positive(self, vals, other, lo, a):
        c = QContext()
        f = LatticeFunction.from_samples({lo + i: v for i, v in enumerate(vals)}, c.q, zero_outside=True)
        g = LatticeFunction.from_samples({lo + i: other[i] for i in range(len(vals))}, c.q, zero_outside=True)
        h = LatticeFunction.from_samples({lo + i: a * vals[i] + other[i] for i in range(len(vals))}, c.q, zero_outside=True)
        If, Ig, Ih = (jackson_0_to_inf(x, c).value for x in (f, g, h))
        assert If >= 0
        assert Ih == pytest.approx(a * If + Ig, rel=1e-12, abs=1e-12 * (abs(a * If) + abs(Ig) + 1))

    @given(
        f=st.lists(st.floats(-5, 5), min_size=6, max_size=6),
        g=st.lists(st.floats(-5, 5), min_size=6, max_size=6),
        nu=st.sampled_from([0.5, 0.25, -0.5]),
    )
    @settings(max_examples=50)
    def test_delta_symmetric(self, f, g, nu):
        c = QContext(nu=nu)
        q = c.q
        # zero padding keeps Delta of each function inside a finite window
        F = {n: (f[n - 1] if 1 <= n <= 6 else 0.0) for n in range(-2, 10)}
        G = {n: (g[n - 1] if 1 <= n <= 6 else 0.0) for n in range(-2, 10)}

        def delta(T, n):
            x = q**n
            return (T.get(n - 1, 0.0) - (1 + q ** (2 * nu)) * T[n] + q ** (2 * nu) * T.get(n + 1, 0.0)) / (x * x)

        def inner(A, B):
            s = {n: A[n] * B[n] * (q**n) ** (2 * nu + 1) for n in range(-1, 9)}
            return jackson_0_to_inf(LatticeFunction.from_samples(s, q, zero_outside=True), c).value

        DF = {n: delta(F, n) for n in range(-1, 9)}
        DG = {n: delta(G, n) for n in range(-1, 9)}
        lhs = inner(DF, G)
        rhs = inner(F, DG)
        scale = sum(abs(DF[n] * G[n]) + abs(F[n] * DG[n]) for n in range(-1, 9)) + 1e-300
        assert abs(lhs - rhs) <= 1e-9 * scale
