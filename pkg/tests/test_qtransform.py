import math

import pytest

from qjacobi import qbessel as qb
from qjacobi import qtransform as qt
from qjacobi.errors import CancellationLoss, DomainError
from qjacobi.qcore import LatticeFunction, QContext, jackson_0_to_inf, wronskian_constant
from qjacobi.verify import sample_functions

import oracle

# K(q**m) for m in (2, 1, 0, -1, -3, -6), from oracle.K at 30 digits
K_FROZEN = {
    (0.5, 0.5): {2: 4.2920516379689940909, 1: 1.3913441736276413438, 0: 0.28882648486387530609,
                 -1: 0.026394125345867593358, -3: 5.7593079131357484781e-6, -6: 6.6534872349316584456e-16},
    (0.7, 0.25): {2: 0.82410800547829241969, 1: 0.34364346787130073165, 0: 0.11004329434529007684,
                  -1: 0.024642661309943433066, -3: 0.00028307770656899410396, -6: 3.1375491562704668433e-9},
    (0.5, -0.5): {2: 1.0229348727299178324, 1: 0.75468164535685570172, 0: 0.40684560194994536578,
                  -1: 0.11801911708607005969, -3: 0.00037146417725391946374, -6: 2.7256010254867810159e-12},
}
C_FROZEN = {(0.5, 0.5): 2.4365988442649144621, (0.7, 0.25): 4.2239231458759334054, (0.5, -0.5): 1.218299422132457231}
BETA_FROZEN = {(0.5, 0.5): 1.6817972359348663959, (0.7, 0.25): 1.633538138968522927, (0.5, -0.5): 0.84089861796743319795}


def key(ctx):
    return (ctx.q, ctx.nu)


class TestConstants:
    def test_frozen(self, ctx):
        k = qt.constants(ctx)
        assert k.c_qnu == pytest.approx(C_FROZEN[key(ctx)], rel=1e-14)
        assert k.beta_nu == pytest.approx(BETA_FROZEN[key(ctx)], rel=1e-14)
        assert k.c_qnu > 0 and all(math.isfinite(v) for v in (k.alpha_nu, k.beta_nu, k.sigma_nu))

    def test_oracle_reproduces_frozen(self):
        assert float(oracle.c_qnu(0.7, 0.25)) == pytest.approx(C_FROZEN[(0.7, 0.25)], rel=1e-15)

    def test_sigma_at_zero_order(self, ctx):
        assert qt.sigma_nu(ctx, order=0) == pytest.approx(1.0, rel=1e-15)

    def test_alpha_is_small_x_limit(self):
        c = QContext()
        x = c.q**40
        lim = x ** (2 * c.nu) * qt.macdonald_integral(x, c).value
        assert lim == pytest.approx(qt.constants(c).alpha_nu, rel=1e-6)

    def test_alpha_negative_order_limit(self):
        c = QContext(nu=-0.5)
        k = qt.constants(c)
        assert qt.macdonald_integral(c.q**60, c).value == pytest.approx(-k.alpha_nu * k.beta_nu, rel=1e-6)

    def test_alpha_against_oracle_limit(self):
        c = QContext(nu=-0.5)
        # K(q**60) at 30 digits stands in for the x -> 0 limit
        lim = oracle.K(60, -0.5, 0.5)
        assert -qt.constants(c).alpha_nu * BETA_FROZEN[(0.5, -0.5)] == pytest.approx(float(lim), rel=1e-13)

    def test_wronskian_i_k(self, ctx):
        k = qt.constants(ctx)
        target = k.alpha_nu * (ctx.q ** (-2 * ctx.nu) - 1)
        for m in range(-3, 8):
            w = wronskian_constant(lambda t: qb.iv(t, ctx), lambda t: qt.kv(t, ctx), ctx.q**m, ctx)
            assert w == pytest.approx(target, rel=1e-6)


class TestMacdonald:
    def test_frozen(self, ctx):
        for m, v in K_FROZEN[key(ctx)].items():
            r = qt.macdonald(ctx.q**m, ctx)
            assert r.value == pytest.approx(v, rel=1e-11)
            assert abs(r.value - v) <= 4 * r.est_error + 1e-15 * abs(v)

    @pytest.mark.parametrize("m", [3, 2, 1, 0, -1])
    def test_routes_agree(self, ctx, m):
        x = ctx.q**m
        a = qt.macdonald_integral(x, ctx)
        b = qt.macdonald_decomposition(x, ctx)
        if not b.cancellation:
            assert abs(a.value - b.value) <= a.est_error + b.est_error

    def test_switch_continuity(self, ctx):
        a = qt.macdonald_integral(1.0, ctx)
        b = qt.macdonald_decomposition(1.0, ctx)
        assert abs(a.value - b.value) <= a.est_error + b.est_error

    def test_recurrence_matches_integral(self, ctx):
        for n in (1, 3):
            a = qt.macdonald_recurrence(n, ctx)
            b = qt.macdonald_integral(ctx.q**-n, ctx)
            assert a.value == pytest.approx(b.value, rel=1e-10)

    def test_positive_and_decaying(self, ctx):
        vals = [qt.kv(ctx.q**m, ctx) for m in range(8, -13, -1)]
        assert all(v > 0 for v in vals)
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-6 * vals[0]

    def test_small_x_leading_term(self):
        c = QContext()
        x = c.q**20
        k = qt.constants(c)
        assert qt.macdonald_decomposition(x, c).value == pytest.approx(k.alpha_nu * x ** (-2 * c.nu), rel=1e-4)

    def test_cancellation_flag(self):
        c = QContext()
        r = qt.macdonald_decomposition(c.q**-8, c)
        assert r.cancellation
        with pytest.raises(CancellationLoss):
            qt.macdonald_decomposition(c.q**-8, c, strict=True)

    def test_l1(self, ctx):
        # K > 0, so its weighted L1 norm is F(K)(0) / c = 1 / c
        nu = ctx.nu
        r = jackson_0_to_inf(lambda t: abs(qt.kv(t, ctx)) * t ** (2 * nu + 1), ctx)
        assert r.value == pytest.approx(1 / qt.constants(ctx).c_qnu, rel=1e-12)

    def test_l2_plancherel(self, ctx):
        nk = qt.weighted_norm(lambda t: qt.kv(t, ctx), ctx)
        nf = qt.weighted_norm(lambda t: 1 / (1 + t * t), ctx)
        assert nk == pytest.approx(nf, rel=1e-12)

    def test_domain(self, ctx0):
        with pytest.raises(DomainError):
            qt.macdonald(-1.0, ctx0)
        with pytest.raises(DomainError):
            qt.macdonald_integral(0.3, ctx0)
        with pytest.raises(DomainError):
            qt.macdonald_recurrence(-1, ctx0)

    def test_off_lattice_point(self, ctx):
        # K is decreasing, so an off-lattice value sits between its lattice neighbours
        r = qt.macdonald(0.3, ctx)
        assert r.method == "decomposition"
        k = math.floor(math.log(0.3) / math.log(ctx.q))
        assert qt.kv(ctx.q**k, ctx) < r.value < qt.kv(ctx.q ** (k + 1), ctx)


class TestFourier:
    @pytest.mark.parametrize("m", [2, 1, 0, -1, 3, -2])
    def test_transform_of_k(self, ctx, m):
        x = ctx.q**m
        v = qt.fourier(lambda t: qt.kv(t, ctx), x, ctx)
        assert v * (1 + x * x) == pytest.approx(1.0, rel=1e-6)

    def test_inversion_and_plancherel(self, ctx):
        for name, f in sample_functions(ctx):
            lo, hi = f.support
            Ff = lambda t, f=f: qt.fourier(f, t, ctx)  # noqa: E731
            for n in range(lo, hi + 1):
                assert qt.fourier(Ff, ctx.q**n, ctx) == pytest.approx(f.at(n), rel=1e-7, abs=1e-7 * max(abs(v) for v in f.samples.values()))
            assert qt.weighted_norm(Ff, ctx) == pytest.approx(qt.weighted_norm(f, ctx), rel=1e-7)

    def test_error_estimate(self, ctx0):
        f = LatticeFunction.from_samples({0: 1.0, 1: 2.0}, ctx0.q, zero_outside=True)
        v, err = qt.fourier(f, 1.0, ctx0, with_error=True)
        assert err >= 0 and v == qt.fourier(f, 1.0, ctx0)

    def test_orthogonality_via_transform(self, ctx):
        # F applied to t -> j(q**m t) sampled at q**n reproduces the delta relation
        q, nu = ctx.q, ctx.nu
        c = qt.constants(ctx).c_qnu
        for m in (-1, 0, 1):
            for n in (-1, 0, 1):
                v = qt.fourier(lambda t: qb.jv(q**m * t, ctx), q**n, ctx) * c
                target = q ** (-2 * n * (nu + 1)) / (1 - q) if n == m else 0.0
                assert v == pytest.approx(target, rel=1e-7, abs=1e-8)

    def test_table(self, ctx0):
        f = LatticeFunction.from_samples({0: 1.0}, ctx0.q, zero_outside=True)
        tab = qt.fourier_table(f, ctx0, -1, 2)
        assert tab.support == (-1, 2)
        assert tab.at(1) == qt.fourier(f, ctx0.q, ctx0)


class TestDecay:
    def test_report(self, ctx):
        dr = qt.decay_report(ctx, 12)
        assert abs(dr.slope_check - math.log(ctx.q)) <= 0.05 * abs(math.log(ctx.q))
        assert dr.monotone_ratios and dr.constant_sign
        assert abs(dr.ratios[-1]) < 1e-3
        assert all(abs(v) <= dr.fitted_sigma * dr.fitted_c**n * ctx.q ** (n * n) * (1 + 1e-12)
                   for n, v in zip(dr.n, dr.values))

    def test_values_match_dispatcher(self, ctx):
        dr = qt.decay_report(ctx, 12)
        for n in (0, 4, 12):
            assert dr.values[n] == pytest.approx(qt.kv(ctx.q**-n, ctx), rel=1e-13)

    def test_oracle_tail(self):
        dr = qt.decay_report(QContext(q=0.7, nu=0.25), 12)
        assert dr.values[6] == pytest.approx(K_FROZEN[(0.7, 0.25)][-6], rel=1e-11)

    def test_short_range(self, ctx0):
        with pytest.raises(DomainError):
            qt.decay_report(ctx0, 5)
