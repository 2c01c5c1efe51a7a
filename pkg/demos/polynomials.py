"""
One polynomial family, three formulas
=====================================

P_n from the three-term recurrence, from a double sum with q-binomials,
and from its monomial coefficients.  The generating function satisfies a
q-difference equation in t; its t-series has radius zero unless x = 0.
"""

# %%
from qjacobi import QContext, qpoly as qp

ctx = QContext(q=0.5, nu=0.5)
x = 0.9
for n in (1, 4, 8, 12):
    rec = qp.pn_eval(x, n, ctx)[0]
    exp = qp.pn_explicit(n, x, ctx)
    line = f"n={n:2d}  recurrence {rec:.12e}  double sum {exp:.12e}"
    if n <= 8:
        coef = sum(qp.pn_coefficient(m, n, ctx) * x**m for m in range(n + 1))
        line += f"  coefficients {coef:.12e}"
    print(line)

# %%
# the printed exponent m(m-1) in the double sum is off by -2mn
print("printed double sum at n=4:", qp.pn_explicit(4, x, ctx, form="printed"))

# %%
for t in (0.05, 0.15, 0.3):
    print(f"t={t}: functional equation residual {qp.genfun_functional_residual(x, t, ctx):.1e}")

g = qp.genfun(0.0, 0.2, 60, ctx)
print(f"x=0: closed {g.closed_value:.15f}  partial sum {g.series_value:.15f}")
g = qp.genfun(1.0, 0.1, 40, ctx)
print(f"x=1: closed {g.closed_value:.6f}  partial sum {complex(g.series_value)}  (no convergence)")
