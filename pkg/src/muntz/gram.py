"""Covariance of the Müntz Wiener integrals and its closed-form inverse.

For ``f(s) = (s**lam_1, ..., s**lam_n)`` the vector ``int_0^t f dB`` has
covariance ``m_t[l, j] = t**(lam_l+lam_j+1) / (lam_l+lam_j+1)``, a Cauchy
matrix. Its inverse is written in terms of the kernel coefficients ``a``:

    alpha_t[l, j] = a_l a_j t**(-lam_l-lam_j-1) / (lam_l+lam_j+1)

and the kernel splits as ``k_n(t, s) = phi(t) . f(s)`` with
``phi_l(t) = a_l t**(-lam_l-1) = (alpha_t f(t))_l``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IllConditioned
from .exponents import ExponentSequence
from .kernel import X_GRID, GoursatKernel, goursat_kernel
from .legendre import MuntzLegendreBasis, power_gram, powers

INVERSE_TOL = 1e-6


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0:
        raise DomainError("time horizon t must be positive")
    return t


def covariance_matrix(seq: ExponentSequence, n: int | None, t: float) -> np.ndarray:
    t = _check_t(t)
    lam = seq.array[: len(seq) if n is None else n]
    return power_gram(lam[:, None], lam[None, :], t).reshape(lam.size, lam.size)


def inverse_residual(m: np.ndarray, alpha: np.ndarray) -> float:
    """Frobenius norm of ``m @ alpha - I`` relative to ``||I||_F``."""
    n = m.shape[0]
    if n == 0:
        return 0.0
    return float(np.linalg.norm(m @ alpha - np.eye(n)) / np.sqrt(n))


def inverse_closed(kern: GoursatKernel, t: float = 1.0, verify: bool = True) -> np.ndarray:
    """Closed-form ``alpha_t``.

    With ``verify`` the product with :func:`covariance_matrix` is checked and
    :class:`IllConditioned` raised if it is off the identity by more than
    ``INVERSE_TOL``.
    """
    t = _check_t(t)
    lam, a = kern.lambdas, kern.a
    s = lam[:, None] + lam[None, :] + 1.0
    alpha = np.outer(a, a) / s * t ** (-s)
    if verify and kern.n:
        res = inverse_residual(covariance_matrix(kern.seq, kern.n, t), alpha)
        if not res <= INVERSE_TOL:
            raise IllConditioned(f"m_t @ alpha_t deviates from I by {res:.3g}")
    return alpha


@dataclass(frozen=True)
class GramPair:
    t: float
    m: np.ndarray
    alpha: np.ndarray

    @property
    def residual(self) -> float:
        return inverse_residual(self.m, self.alpha)

    def condition_number(self) -> float:
        """Ratio of extreme eigenvalues of the (symmetric) covariance matrix."""
        if self.m.size == 0:
            return 1.0
        ev = np.linalg.eigvalsh(self.m)
        return float(ev[-1] / ev[0]) if ev[0] > 0 else float("inf")


def gram_pair(kern: GoursatKernel, t: float = 1.0) -> GramPair:
    return GramPair(float(t), covariance_matrix(kern.seq, kern.n, t),
                    inverse_closed(kern, t, verify=False))


def goursat_phi(kern: GoursatKernel, t: float, check: bool = True) -> np.ndarray:
    """``phi(t)`` with ``phi_l(t) = a_l t**(-lam_l-1)``.

    ``check`` recomputes it as ``alpha_t @ f(t)`` and raises
    :class:`IllConditioned` on a relative mismatch above ``INVERSE_TOL``.
    """
    t = _check_t(t)
    phi = kern.a * t ** (-kern.lambdas - 1.0)
    if check and kern.n:
        via_alpha = inverse_closed(kern, t, verify=False) @ (t ** kern.lambdas)
        gap = np.max(np.abs(phi - via_alpha)) / max(1.0, np.max(np.abs(phi)))
        if not gap <= INVERSE_TOL:
            raise IllConditioned(f"phi closed form and alpha_t f(t) differ by {gap:.3g}")
    return phi


def alpha_tail_integral(kern: GoursatKernel, t: float) -> np.ndarray:
    """``int_t^inf phi(u) phi(u)^T du``, evaluated with the power rule."""
    t = _check_t(t)
    lam, a = kern.lambdas, kern.a
    e = lam[:, None] + lam[None, :] + 1.0     # integrand decays like u**-(e+1)
    return np.outer(a, a) * t ** (-e) / e


# -- reproducing kernel of the Müntz space on [0, t] --------------------------

def reproducing_kernel_eval(basis: MuntzLegendreBasis, t: float, u, v):
    """``g_{n,t}(u, v) = (1/t) sum_l (1 + 2 lam_l) L_l(u/t) L_l(v/t)``."""
    t = _check_t(t)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(u <= 0) or np.any(v <= 0) or np.any(u > t) or np.any(v > t):
        raise DomainError("need 0 < u, v <= t")
    w = 1.0 + 2.0 * basis.lambdas
    C = basis.coeffs
    Lu = powers(basis.lambdas, u / t) @ C.T
    Lv = powers(basis.lambdas, v / t) @ C.T
    out = np.sum(Lu * Lv * w, axis=-1) / t
    return float(out) if np.ndim(out) == 0 else out


def reproduction_residual(basis: MuntzLegendreBasis, t: float = 1.0,
                          kern: GoursatKernel | None = None,
                          grid: np.ndarray = X_GRID) -> float:
    """Max of two analytic checks over the probe grid ``u = t * grid``:

    * ``int_0^t g_{n,t}(u, v) v**lam_m dv = u**lam_m`` for every ``m <= n``;
    * ``k_n(t, s) = g_{n,t}(t, s)``.
    """
    t = _check_t(t)
    n = basis.n
    if n == 0:
        return 0.0
    if kern is None:
        kern = goursat_kernel(basis.seq, n)
    lam = basis.lambdas
    C = basis.coeffs
    w = 1.0 + 2.0 * lam
    u = t * grid
    Lu = powers(lam, u / t) @ C.T                              # L_l(u/t), shape (g, n)
    # int_0^t L_l(v/t) v**lam_m dv = sum_p c_{p,l} t**-lam_p int_0^t v**(lam_p+lam_m) dv
    M = C @ (t ** -lam[:, None] * power_gram(lam[:, None], lam[None, :], t))   # (l, m)
    lhs = (Lu * w) @ M / t
    reproduce = np.max(np.abs(lhs - powers(lam, u)))
    boundary = np.max(np.abs(kern.k(t, u) - reproducing_kernel_eval(basis, t, t, u)))
    return float(max(reproduce, boundary))
