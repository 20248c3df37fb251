"""Goursat-Volterra kernels of finite order built from Müntz exponents.

The order-``n`` kernel is ``k_n(t, s) = K_n(s/t) / t`` for ``s <= t`` (zero
otherwise) with ``K_n(x) = sum_j a_j x**lam_j``, where the coefficients solve
the Cauchy-type system

    sum_j a_j / (lam_j + lam_k + 1) = 1,   k = 1..n

and have the closed form

    a_j = prod_l (lam_j + lam_l + 1) / prod_{l != j} (lam_j - lam_l).

The transform ``T_n(B)_t = int_0^t rho_n(t/s) dB_s`` uses
``rho_n(x) = 1 - int_1^x K_n(1/r) dr/r``.

All identity checks below are finite sums of powers evaluated exactly; none
of them uses quadrature.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, DuplicateExponent, ExponentOutOfRange, IllConditioned, SingularSystem, ValidationError
from .exponents import ExponentSequence
from .legendre import ZERO_EXPONENT, MuntzLegendreBasis, power_gram, powers, signed_log_ratio

#: relative closed-form vs linear-solve disagreement tolerated at construction
CONDITIONING_TOL = 1e-6

#: geometric probe grid in (0, 1] for identities in x
X_GRID = np.geomspace(1e-4, 1.0, 33)

#: (t, s) probe pairs with 0 < s <= t <= 2
TS_GRID = np.array([(t, f * t) for t in (0.5, 1.0, 2.0) for f in (0.05, 0.25, 0.5, 0.75, 1.0)])


def _order(seq: ExponentSequence, n: int | None) -> int:
    n = len(seq) if n is None else n
    if not 0 <= n <= len(seq):
        raise ValidationError(f"order n={n} outside 0..{len(seq)}")
    return n


def coefficients_closed(seq: ExponentSequence, n: int | None = None) -> np.ndarray:
    """Closed-form ``a_{j,n}``, products accumulated in log space."""
    n = _order(seq, n)
    lam = seq.array[:n]
    return np.array([signed_log_ratio(lam[j] + lam + 1.0, lam[j] - np.delete(lam, j))
                     for j in range(n)])


def cauchy_matrix(lam: np.ndarray) -> np.ndarray:
    """``G[k, j] = 1 / (lam_j + lam_k + 1)``, the Gram matrix of the powers on [0, 1]."""
    return 1.0 / (lam[:, None] + lam[None, :] + 1.0)


def coefficients_system(seq: ExponentSequence, n: int | None = None) -> np.ndarray:
    """Solve the Cauchy system by LU with partial pivoting."""
    n = _order(seq, n)
    lam = seq.array[:n]
    if n == 0:
        return np.zeros(0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        try:
            return scipy.linalg.solve(cauchy_matrix(lam), np.ones(n))
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc


def system_residual(lambdas, a) -> float:
    """``max_k |sum_j a_j/(lam_j+lam_k+1) - 1|``."""
    lam = np.asarray(lambdas, dtype=float)
    if lam.size == 0:
        return 0.0
    return float(np.max(np.abs(cauchy_matrix(lam) @ np.asarray(a) - 1.0)))


def _log_term(lam: np.ndarray, logx: np.ndarray) -> np.ndarray:
    """``(1 - x**-lam)/lam`` at ``log x``, with the ``log x`` limit for lam = 0."""
    zero = np.abs(lam) < ZERO_EXPONENT
    safe = np.where(zero, 1.0, lam)
    out = -np.expm1(-lam * logx) / safe
    return np.where(zero, logx, out)


@dataclass(frozen=True)
class GoursatKernel:
    """Order-``n`` kernel: the first ``n`` exponents of ``seq`` and coefficients ``a``."""

    seq: ExponentSequence
    a: np.ndarray

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def lambdas(self) -> np.ndarray:
        return self.seq.array[: self.n]

    def K(self, x):
        """``K_n(x) = sum_j a_j x**lam_j`` for ``x`` in [0, 1]."""
        out = powers(self.lambdas, x) @ self.a
        return float(out) if np.ndim(out) == 0 else out

    def k(self, t, s):
        """``k_n(t, s) = K_n(s/t)/t`` for ``s <= t`` and 0 for ``s > t``."""
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        if np.any(t <= 0):
            raise DomainError("k_n needs t > 0")
        t, s = np.broadcast_arrays(t, s)
        below = s <= t
        out = np.zeros(t.shape)
        if np.any(below):
            out[below] = self.K(s[below] / t[below]) / t[below]
        return float(out) if out.ndim == 0 else out

    def rho(self, x):
        """``rho_n(x) = 1 - sum_j a_j (1 - x**-lam_j)/lam_j`` for ``x >= 1``."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 1):
            raise DomainError("rho_n is defined on x >= 1")
        logx = np.log(x)[..., None]
        out = 1.0 - _log_term(self.lambdas, logx) @ self.a
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {"lambdas": [float(v) for v in self.lambdas], "n": self.n,
                "a": [float(v) for v in self.a]}


def goursat_kernel(seq: ExponentSequence, n: int | None = None) -> GoursatKernel:
    """Build the order-``n`` kernel and cross-check the two coefficient routes.

    Raises
    ------
    IllConditioned
        if closed form and linear solve disagree by more than
        ``CONDITIONING_TOL`` relative to the largest coefficient.
    """
    n = _order(seq, n)
    closed = coefficients_closed(seq, n)
    if n:
        solved = coefficients_system(seq, n)
        scale = np.max(np.abs(closed))
        disagreement = np.max(np.abs(closed - solved)) / scale
        if not disagreement <= CONDITIONING_TOL:
            raise IllConditioned(
                f"closed-form and solved coefficients differ by {disagreement:.3g} (relative)")
    return GoursatKernel(seq.prefix(n), closed)


def identity_kernel(seq: ExponentSequence) -> GoursatKernel:
    """The order-0 kernel: ``K_0 = 0`` and ``rho_0 = 1``."""
    return GoursatKernel(seq.prefix(0), np.zeros(0))


# -- identities -------------------------------------------------------------

def self_reproduction_residual(kern: GoursatKernel, pairs: np.ndarray = TS_GRID,
                               relative: bool = False) -> float:
    """Max over ``pairs`` of ``|k(t,s) - int_0^s k(t,u) k(s,u) du|``.

    The right side is expanded as
    ``sum_{j,l} a_j a_l t**(-lam_j-1) s**(-lam_l-1) s**(lam_j+lam_l+1)/(lam_j+lam_l+1)``.
    With ``relative=True`` each difference is divided by the sum of the
    absolute summands, which is the scale of the rounding error.
    """
    if kern.n == 0:
        return 0.0
    lam, a = kern.lambdas, kern.a
    worst = 0.0
    for t, s in pairs:
        terms = (np.outer(a * t ** (-lam - 1.0), a * s ** (-lam - 1.0))
                 * power_gram(lam[:, None], lam[None, :], s))
        diff = abs(kern.k(t, s) - terms.sum())
        if relative:
            diff /= max(np.abs(terms).sum(), 1.0)
        worst = max(worst, diff)
    return float(worst)


def fixed_point_residual(kern: GoursatKernel, grid: np.ndarray = X_GRID,
                         relative: bool = False) -> float:
    """Max over ``grid`` of ``|K(u) - int_0^1 K(uv) K(v) dv|`` evaluated termwise."""
    if kern.n == 0:
        return 0.0
    lam, a = kern.lambdas, kern.a
    P = powers(lam, grid)                      # u**lam_j
    inner = cauchy_matrix(lam) @ a             # sum_l a_l/(lam_j+lam_l+1)
    rhs = P @ (a * inner)
    diff = np.abs(kern.K(grid) - rhs)
    if relative:
        diff = diff / np.maximum(np.abs(P) @ (np.abs(a) * (cauchy_matrix(lam) @ np.abs(a))), 1.0)
    return float(np.max(diff))


def legendre_identity_residual(kern: GoursatKernel, basis: MuntzLegendreBasis,
                               grid: np.ndarray = X_GRID, relative: bool = False) -> float:
    """``K_n = sum_j (1+2 lam_j) L_j``, checked on ``grid`` and coefficientwise.

    ``relative=True`` divides by ``max(1, max|a|)``.
    """
    n = kern.n
    if n == 0:
        return 0.0
    w = 1.0 + 2.0 * kern.lambdas
    C = basis.coeffs[:n, :n]
    coeff_gap = np.max(np.abs(kern.a - C.T @ w))
    P = powers(kern.lambdas, grid)
    grid_gap = np.max(np.abs(kern.K(grid) - (P @ C.T) @ w))
    scale = max(1.0, np.max(np.abs(kern.a))) if relative else 1.0
    return float(max(coeff_gap, grid_gap) / scale)


def derivative_identity_residual(kern: GoursatKernel, basis: MuntzLegendreBasis,
                                 relative: bool = False) -> float:
    """``a_{j,n} = (lam_j + lam_n + 1) c_{j,n}``, the coefficient form of
    ``K_n(x) = x**-lam_n d/dx (x**(lam_n+1) L_n(x))``."""
    n = kern.n
    if n == 0:
        return 0.0
    lam = kern.lambdas
    c = basis.coeffs[n - 1, :n]
    scale = max(1.0, np.max(np.abs(kern.a))) if relative else 1.0
    return float(np.max(np.abs(kern.a - (lam + lam[-1] + 1.0) * c)) / scale)


def recurrence_step(kern: GoursatKernel, lam_new: float,
                    gap_epsilon: float | None = None) -> np.ndarray:
    """Coefficients of ``K_n`` from ``K_{n-1}`` and the new exponent ``lam_new``.

    Termwise evaluation of
    ``K_n(x) = K_{n-1}(x) + (2 lam_n + 1) x**lam_n (1 - int_x^1 u**(-lam_n-1) K_{n-1}(u) du)``.
    Returned coefficients are ordered as ``(lam_1, ..., lam_{n-1}, lam_new)``.
    """
    lam_new = float(lam_new)
    if not lam_new > -0.5:
        raise ExponentOutOfRange(f"lambda = {lam_new!r} must be > -1/2")
    gap = kern.seq.gap_epsilon if gap_epsilon is None else gap_epsilon
    lam, a = kern.lambdas, kern.a
    d = lam - lam_new
    if np.any(np.abs(d) < gap):
        # the termwise integral would need the log branch: only for a repeated exponent
        raise DuplicateExponent(f"lambda = {lam_new!r} repeats an existing exponent")
    w = 2.0 * lam_new + 1.0
    # int_x^1 u**(lam_j - lam_n - 1) du = (1 - x**d_j)/d_j
    return np.append(a + w * a / d, w * (1.0 - np.sum(a / d)))


def cauchy_l2_distance(seq: ExponentSequence, m: int, n: int) -> float:
    """``int_0^1 (K_n - K_m)**2 du`` evaluated exactly from the coefficients."""
    if not 0 <= m <= n <= len(seq):
        raise ValidationError(f"need 0 <= m <= n <= {len(seq)}")
    if m == n:
        return 0.0
    lam = seq.array[:n]
    d = coefficients_closed(seq, n)
    d[:m] -= coefficients_closed(seq, m)
    return float(d @ cauchy_matrix(lam) @ d)


def rho_moment(kern: GoursatKernel, q: float) -> float:
    """``int_0^1 u**q rho_n(1/u) du`` by the power rule (log branch for lam_j = 0).

    Vanishes for ``q`` in ``{lam_1..lam_n}``; ``t**(q+1)`` times this value is
    ``int_0^t s**q rho_n(t/s) ds``.
    """
    q = float(q)
    if not q > -1:
        raise DomainError("rho_moment needs q > -1")
    total = 1.0 / (q + 1.0)
    for lam, a in zip(kern.lambdas, kern.a):
        if abs(lam) < ZERO_EXPONENT:
            # rho contains -a ln(1/u) = a ln u, and int_0^1 u**q ln u du = -1/(q+1)**2
            total -= a / (q + 1.0) ** 2
        else:
            total -= a / lam * (1.0 / (q + 1.0) - 1.0 / (q + lam + 1.0))
    return float(total)


def rho_orthogonality_residual(kern: GoursatKernel) -> float:
    if kern.n == 0:
        return 0.0
    return float(max(abs(rho_moment(kern, lam)) for lam in kern.lambdas))
