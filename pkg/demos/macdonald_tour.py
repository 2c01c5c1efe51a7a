"""
The q-Macdonald function, three ways
====================================

K_nu is computed by a Jackson integral on the lattice, by a two-term
decomposition in I_nu and pi_nu near the origin, and by a minimal-solution
recurrence far out.  This script shows that the routes agree where they
overlap and that the transform of K is 1/(1+x**2).
"""

# %%
import math

from qjacobi import QContext, qtransform as qt

ctx = QContext(q=0.5, nu=0.5)
k = qt.constants(ctx)
print(f"c = {k.c_qnu:.15g}  alpha = {k.alpha_nu:.15g}  beta = {k.beta_nu:.15g}")

# %%
# integral and decomposition on x <= 1; the decomposition cancels badly for large x
for m in (4, 2, 0, -1, -3):
    x = ctx.q**m
    a = qt.macdonald_integral(x, ctx)
    b = qt.macdonald_decomposition(x, ctx)
    flag = " (cancellation)" if b.cancellation else ""
    print(f"x = q**{m:+d}: integral {a.value:.15e}  decomposition {b.value:.15e}{flag}")

# %%
# F(K)(x) (1 + x**2) should be 1
for m in (2, 1, 0, -1):
    x = ctx.q**m
    v = qt.fourier(lambda t: qt.kv(t, ctx), x, ctx)
    print(f"x = q**{m:+d}: F(K)(x)(1+x^2) - 1 = {v * (1 + x * x) - 1:.2e}")

# %%
# log K(q**-n) bends down like n**2 log q
dr = qt.decay_report(ctx, 12)
print(f"fitted n^2 coefficient {dr.slope_check:.5f} vs log q = {math.log(ctx.q):.5f}")
for n, r in zip(dr.n[1:], dr.ratios):
    print(f"  K(q^-{n}) / K(q^-{n - 1}) = {r:.3e}")
