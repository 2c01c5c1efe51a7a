"""
Where the orthogonality measure lives
=====================================

The Jacobi matrix of the polynomials has coefficients that shrink like
q**(2n), so its spectrum is bounded.  Its Gauss rules, the poles of the
Stieltjes transform and its residues all describe the same negative,
accumulating-at-zero point set.  The positive points q**-2 j_k**2 built
from the q-Bessel zeros grow without bound and are not in the spectrum.
"""

# %%
import numpy as np

from qjacobi import QContext, qpoly as qp

ctx = QContext(q=0.5, nu=0.5)
cf = qp.measure(ctx, 6)
qd = qp.measure(ctx, 6, "quadrature")
pf = qp.measure(ctx, 6, "printed_formula")

print(" k   closed-form t_k       quadrature t_k        mass")
for k in range(6):
    print(f"{k:2d}  {cf.support[k]: .15e}  {qd.support[k]: .15e}  {cf.masses[k]:.6e}")
print("total mass of 25 closed-form points:", qp.measure(ctx, 25).total_mass())

# %%
print("points from the q-Bessel zeros:", np.array2string(pf.support, precision=4))
print("their masses:", np.array2string(pf.masses, precision=3))

# %%
# the recurrence limit Q_n/P_n is finite at those points
for t in pf.support[:3]:
    print(f"S({t:.4f}) = {qp.stieltjes_limit(float(t), ctx):.6f}")
