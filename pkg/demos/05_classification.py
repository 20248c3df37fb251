"""Which exponent sequences admit infinite-order transforms, and which keep semimartingales."""
import numpy as np

from muntz import classify, geometric_p_family, hyperharmonic_family, validate

cases = {
    "p_j = j^-2 / 2": hyperharmonic_family(2.0, 1),
    "p_j = j^-1 / 2": hyperharmonic_family(1.0, 1),
    "p_j = 2^j": geometric_p_family(2.0, 1),
}
for label, seq in cases.items():
    res = classify(seq)
    print(f"{label:16s} -> {res.name}")
    print(f"    Müntz-Szász partial sum {res.ms_partial_sums[-1]:.6f} ({res.ms.reason})")
    print(f"    sum p_j {res.p_sum_partial[-1]:.6g}, bounded exponents: {res.bounded}")

# any rule j -> lambda_j works
res = classify(validate([1.0]), extension_rule=lambda j: np.asarray(j, dtype=float) ** 2)
print("lambda_j = j^2   ->", res.name)
