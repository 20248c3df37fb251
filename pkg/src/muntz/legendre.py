"""Müntz-Legendre polynomials and exact power-rule Gram integrals.

``L_k(x) = sum_{j<=k} c[j,k] x**lam_j`` with

    c[j,k] = prod_{l<k} (lam_l + lam_j + 1) / prod_{l<=k, l!=j} (lam_j - lam_l)

The polynomials are orthogonal on [0, 1], normalised by ``L_k(1) = 1``, and
``int_0^1 L_k**2 = 1/(1 + 2 lam_k)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoefficientOverflow, DomainError, ValidationError
from .exponents import ExponentSequence

_LOG_MAX = math.log(np.finfo(float).max)
ZERO_EXPONENT = 1e-14


def signed_log_ratio(numer: np.ndarray, denom: np.ndarray) -> float:
    """``prod(numer) / prod(denom)`` accumulated as (sign, sum of logs).

    Raises :class:`CoefficientOverflow` if the magnitude is not representable.
    """
    numer = np.asarray(numer, dtype=float)
    denom = np.asarray(denom, dtype=float)
    sign = np.prod(np.sign(numer)) * np.prod(np.sign(denom))
    logmag = np.sum(np.log(np.abs(numer))) - np.sum(np.log(np.abs(denom)))
    if logmag > _LOG_MAX:
        raise CoefficientOverflow(f"coefficient magnitude exp({logmag:.1f}) overflows")
    return float(sign * math.exp(logmag))


def power_gram(a, b, t=1.0):
    """``int_0^t x**a x**b dx = t**(a+b+1) / (a+b+1)``; broadcasts over arrays."""
    s = np.asarray(a, dtype=float) + np.asarray(b, dtype=float) + 1.0
    if np.any(s <= 0):
        raise DomainError("power_gram needs a + b + 1 > 0")
    out = np.power(t, s) / s
    return float(out) if np.ndim(out) == 0 else out


def legendre_coefficients(lams: np.ndarray, n: int) -> np.ndarray:
    """Lower-triangular table ``C[k-1, j-1] = c[j,k]`` for ``1 <= j <= k <= n``."""
    lams = np.asarray(lams, dtype=float)
    C = np.zeros((n, n))
    for k in range(1, n + 1):
        for j in range(1, k + 1):
            lj = lams[j - 1]
            numer = lams[: k - 1] + lj + 1.0
            others = np.delete(lams[:k], j - 1)
            C[k - 1, j - 1] = signed_log_ratio(numer, lj - others)
    return C


@dataclass(frozen=True)
class MuntzLegendreBasis:
    """``L_1 .. L_n`` for the first ``n`` exponents of ``seq``.

    ``coeffs[k-1, j-1]`` holds ``c[j,k]``: row ``k`` is the polynomial, column
    ``j`` the exponent.
    """

    seq: ExponentSequence
    coeffs: np.ndarray

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @property
    def lambdas(self) -> np.ndarray:
        return self.seq.array[: self.n]

    def __call__(self, k: int, x):
        return legendre_eval(self, k, x)

    def gram(self) -> np.ndarray:
        """Exact ``int_0^1 L_j L_k dx`` for all pairs (should be diagonal)."""
        lam = self.lambdas
        G = power_gram(lam[:, None], lam[None, :], 1.0)
        return self.coeffs @ G @ self.coeffs.T

    def rows(self):
        """``(k, j, c[j,k])`` triples of the nonzero triangle, for CSV export."""
        for k in range(1, self.n + 1):
            for j in range(1, k + 1):
                yield k, j, float(self.coeffs[k - 1, j - 1])


def build_basis(seq: ExponentSequence, n: int | None = None) -> MuntzLegendreBasis:
    n = len(seq) if n is None else n
    if not 0 <= n <= len(seq):
        raise ValidationError(f"order n={n} outside 0..{len(seq)}")
    return MuntzLegendreBasis(seq, legendre_coefficients(seq.array[:n], n))


def powers(lams: np.ndarray, x) -> np.ndarray:
    """Matrix ``x[..., None] ** lams`` with the x = 0 limits spelled out.

    ``0**lam`` is 0 for ``lam > 0`` and 1 for ``lam == 0``; negative exponents
    at zero raise :class:`DomainError`.
    """
    x = np.asarray(x, dtype=float)
    lams = np.asarray(lams, dtype=float)
    if np.any(x < 0):
        raise DomainError("Müntz polynomials are defined for x >= 0 only")
    if np.any(x == 0) and np.any(lams < 0):
        raise DomainError("x = 0 with a negative exponent present")
    with np.errstate(divide="ignore", invalid="ignore"):
        logx = np.log(x)[..., None]
        out = np.exp(lams * logx)
    zero = x == 0
    if np.any(zero):
        out[zero] = (np.abs(lams) < ZERO_EXPONENT).astype(float)
    return out


def legendre_eval(basis: MuntzLegendreBasis, k: int, x):
    """``L_k(x)``; ``x`` may be a scalar or an array."""
    if not 1 <= k <= basis.n:
        raise ValidationError(f"k={k} outside 1..{basis.n}")
    c = basis.coeffs[k - 1, :k]
    lam = basis.lambdas[:k]
    if np.any(np.asarray(x) == 0):
        # only exponents actually present in L_k matter for the x = 0 limit
        lam = lam[c != 0]
        c = c[c != 0]
    out = powers(lam, x) @ c
    return float(out) if np.ndim(out) == 0 else out
