"""Covariance of the Müntz Wiener integrals, its closed-form inverse and the reproducing kernel."""
import numpy as np

from muntz import build_basis, goursat_kernel, gram_pair, reproducing_kernel_eval, validate

kern = goursat_kernel(validate([0.0, 1.0, 2.0, 3.0]))
for t in (0.5, 1.0, 2.0):
    pair = gram_pair(kern, t)
    print(f"t={t}: ||m alpha - I|| = {pair.residual:.1e}, condition number {pair.condition_number():.3g}")
print("alpha_1 =\n", gram_pair(kern, 1.0).alpha)

# the boundary value of the reproducing kernel is the Goursat kernel itself
basis = build_basis(kern.seq)
s = np.array([0.1, 0.5, 0.9])
print("g(1, s):", reproducing_kernel_eval(basis, 1.0, 1.0, s))
print("k(1, s):", kern.k(1.0, s))
