"""Müntz-Legendre polynomials and Goursat kernel coefficients for a small exponent set."""
import numpy as np

from muntz import build_basis, coefficients_system, goursat_kernel, hyperharmonic_family, validate

seq = validate([1.0, 2.0])
basis = build_basis(seq)
print("L_k(x) = sum_j c[j,k] x**lam_j, rows k, columns j:")
print(basis.coeffs)
print("Gram matrix of L_1, L_2 on [0,1] (diagonal 1/(1+2 lam_k)):")
print(basis.gram())

kern = goursat_kernel(seq)
print("\nkernel coefficients a:", kern.a, " from the linear system:", coefficients_system(seq))
print("K(x) = sum a_j x**lam_j at x = 0.5, 1:", kern.K(np.array([0.5, 1.0])))
print("k(t, s) at t=1, s=0.5:", kern.k(1.0, 0.5))

# a family with closed-form coefficients: a_k = k^-r prod_{j!=k} (j^r+k^r)/(j^r-k^r)
hh = goursat_kernel(hyperharmonic_family(1.0, 4))
print("\nhyperharmonic r=1, n=4: lambdas", hh.lambdas, "a", hh.a)
