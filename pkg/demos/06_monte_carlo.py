"""Transform simulated Brownian paths and confirm the output is again Brownian,
independent of the Müntz integrals of the input."""
import time

from muntz import goursat_kernel, validate
from muntz.pathsim import (bridge_convergence, brownian_statistics, generate, iterate,
                           orthogonality_statistics)

start = time.perf_counter()
kern = goursat_kernel(validate([1.0, 2.0]))
ens = generate(T=1.0, M=1024, P=2 ** 14, seed=42, workers=4)
levels = iterate(ens, kern, 2, workers=4)
for k in (1, 2):
    stats = brownian_statistics(levels[k]) + orthogonality_statistics(levels[k], levels[k - 1], kern)
    for s in stats:
        print(f"T^{k}: {s.name:22s} {s.estimate.value:+.4f} +/- {s.estimate.std_error:.4f}"
              f"  target {s.target:+.3f}  z={s.z_score:+.2f}")

rms_m, rms_2m, ratio = bridge_convergence(kern, 1.0, 512, 4096, seed=42)
print(f"bridge constraint RMS: M=512 {rms_m:.3e}, M=1024 {rms_2m:.3e}, ratio {ratio:.2f}")
print(f"elapsed {time.perf_counter() - start:.1f}s")
