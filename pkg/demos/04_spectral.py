"""Moving-average kernel, its Fourier transform and truncated infinite Blaschke products."""
import numpy as np

from muntz import (BlaschkeProduct, eta_from_kernel, fourier_closed, goursat_kernel,
                   ou_covariance, pi_infinity_truncated, validate)
from muntz.spectral import family_p_rule

kern = goursat_kernel(validate([1.0, 2.0]))
eta = eta_from_kernel(kern)
print("eta(t) = sum b exp(-q t): b =", eta.weights, "q =", eta.rates)
print("int eta^2 =", (eta * eta).integral())
for h in (0.0, 0.5, 2.0):
    print(f"  covariance at lag {h}: {ou_covariance(eta, h):.15f}  vs exp(-h/2) {np.exp(-h / 2):.15f}")

xi = np.array([-2.0, 0.0, 1.0, 5.0])
print("Fourier transform:", fourier_closed(BlaschkeProduct.from_kernel(kern), xi))
print("from partial fractions:", eta.fourier(xi))

rule, majorant = family_p_rule({"name": "hyperharmonic", "r": 2.0})
for N in (10, 100, 1000):
    value, bound = pi_infinity_truncated(rule, 1.0, N, majorant)
    print(f"N={N:5d}: H(1) ~ {value:.10f}  (tail bound {bound:.2e})")
