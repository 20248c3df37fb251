"""One-shot battery of the analytic identities a kernel must satisfy.

Residuals whose rounding error grows with the coefficient size are reported
relative to that size, so one tolerance serves both small and large
coefficient sets.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gram import gram_pair, reproduction_residual
from .kernel import (GoursatKernel, cauchy_matrix, coefficients_closed, coefficients_system,
                     derivative_identity_residual, fixed_point_residual, identity_kernel,
                     legendre_identity_residual, recurrence_step, rho_orthogonality_residual,
                     self_reproduction_residual)
from .legendre import build_basis
from .spectral import (BlaschkeProduct, eta_from_kernel, fourier_closed,
                       fourier_partial_fractions, orthogonality_zero, ou_covariance)

IDENTITY_TOL = 1e-10
RECURRENCE_TOL = 1e-8
GRAM_TOL = 1e-8
XI_PROBES = np.linspace(-10.0, 10.0, 25)
LAG_PROBES = (0.0, 0.1, 0.5, 1.0, 3.0)


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


def _scale(a: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0


def _recurrence_gap(kern: GoursatKernel) -> float:
    k = identity_kernel(kern.seq)
    a = k.a
    for j, lam in enumerate(kern.lambdas):
        a = recurrence_step(k, lam)
        k = GoursatKernel(kern.seq.prefix(j + 1), a)
    return float(np.max(np.abs(a - kern.a), initial=0.0) / _scale(kern.a))


def _cauchy_gap(kern: GoursatKernel) -> float:
    """``int (K_n - K_m)**2 = sum_{m<j<=n} (1 + 2 lam_j)`` for every ``m < n``."""
    n = kern.n
    lam = kern.lambdas
    G = cauchy_matrix(lam) if n else np.zeros((0, 0))
    worst = 0.0
    for m in range(n):
        d = kern.a.copy()
        if m:
            d[:m] -= coefficients_closed(kern.seq, m)
        target = float(np.sum(1.0 + 2.0 * lam[m:]))
        # rounding scale: the sum of the absolute summands of d^T G d
        worst = max(worst, abs(d @ G @ d - target) / max(1.0, float(np.abs(d) @ G @ np.abs(d))))
    return worst


def run_identities(kern: GoursatKernel, t: float = 1.0) -> list[IdentityCheck]:
    """Evaluate every identity for ``kern``; an order-0 kernel passes vacuously."""
    n = kern.n
    basis = build_basis(kern.seq, n)
    scale = _scale(kern.a)
    es = eta_from_kernel(kern)
    bp = BlaschkeProduct.from_kernel(kern)

    checks = []
    routes = 0.0
    if n:
        routes = float(np.max(np.abs(coefficients_closed(kern.seq, n)
                                     - coefficients_system(kern.seq, n))) / scale)
    checks.append(IdentityCheck("closed_vs_system", routes, 1e-6))
    checks.append(IdentityCheck("self_reproduction",
                                self_reproduction_residual(kern, relative=True), IDENTITY_TOL))
    checks.append(IdentityCheck("fixed_point",
                                fixed_point_residual(kern, relative=True), IDENTITY_TOL))
    checks.append(IdentityCheck("legendre_identity",
                                legendre_identity_residual(kern, basis, relative=True),
                                IDENTITY_TOL))
    checks.append(IdentityCheck("derivative_identity",
                                derivative_identity_residual(kern, basis, relative=True),
                                IDENTITY_TOL))
    checks.append(IdentityCheck("recurrence", _recurrence_gap(kern), RECURRENCE_TOL))
    checks.append(IdentityCheck("gram_inverse", gram_pair(kern, t).residual, GRAM_TOL))
    checks.append(IdentityCheck("reproducing_kernel",
                                reproduction_residual(basis, t, kern) / scale, IDENTITY_TOL))
    four = np.max(np.abs(fourier_partial_fractions(es, XI_PROBES) - fourier_closed(bp, XI_PROBES)))
    checks.append(IdentityCheck("fourier_agreement", float(four) / scale, IDENTITY_TOL))
    ou = max(abs(ou_covariance(es, h) - np.exp(-h / 2)) for h in LAG_PROBES)
    checks.append(IdentityCheck("ou_covariance", float(ou) / scale ** 2, IDENTITY_TOL))
    zeros = max((abs(orthogonality_zero(es, p)) for p in kern.lambdas + 0.5), default=0.0)
    checks.append(IdentityCheck("orthogonality_zeros", float(zeros) / scale, IDENTITY_TOL))
    checks.append(IdentityCheck("rho_orthogonality",
                                rho_orthogonality_residual(kern) / scale, IDENTITY_TOL))
    checks.append(IdentityCheck("cauchy_l2", _cauchy_gap(kern), IDENTITY_TOL))
    return checks
