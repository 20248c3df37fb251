"""Check every analytic identity of a kernel built from random well-separated exponents."""
import numpy as np

from muntz import goursat_kernel, run_identities, validate

rng = np.random.default_rng(1)
lams = -0.4 + np.cumsum(np.r_[0.0, rng.uniform(0.5, 1.0, 5)])
kern = goursat_kernel(validate(rng.permutation(lams)))
print("exponents:", np.round(kern.lambdas, 4))
print("largest |a_j|:", np.abs(kern.a).max())
for check in run_identities(kern):
    print(f"  {check.name:22s} {check.residual:10.2e}  (tol {check.tolerance:.0e})"
          f"  {'ok' if check.passed else 'FAILED'}")
