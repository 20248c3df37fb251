"""Moving-average side of the Müntz transforms.

Under the time change ``u -> e^u`` the transformed Brownian motion becomes a
stationary Ornstein-Uhlenbeck process with moving-average kernel

    eta_n(t) = e^{-t/2} rho_n(e^t),   t > 0,

a finite exponential sum. Its Fourier transform is
``(1/2 - i xi)^{-1} prod_j (xi - i p_j)/(xi + i p_j)`` with ``p_j = lam_j + 1/2``.
Everything here is closed form: exponential sums are integrated, shifted,
multiplied and transformed exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DivergentProduct, DomainError, NormalizationPole, ValidationError
from .exponents import DEFAULT_TAIL_TERMS, SequenceKind, classify, family_p_values, validate
from .kernel import GoursatKernel
from .legendre import ZERO_EXPONENT


@dataclass(frozen=True)
class ExponentialSum:
    """``f(t) = sum_i b_i t**d_i exp(-q_i t)`` on ``t > 0``.

    ``d_i`` are small non-negative integers; ``d = 1`` only arises from a zero
    exponent in the kernel, products can raise it further.
    """

    weights: np.ndarray
    rates: np.ndarray
    degrees: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.weights, dtype=float))
        q = np.atleast_1d(np.asarray(self.rates, dtype=float))
        d = np.atleast_1d(np.asarray(self.degrees, dtype=int))
        if not b.shape == q.shape == d.shape:
            raise ValidationError("weights, rates and degrees must have equal length")
        if np.any(q <= 0):
            raise ValidationError("all decay rates must be strictly positive")
        if np.any(d < 0):
            raise ValidationError("degrees must be non-negative")
        object.__setattr__(self, "weights", b)
        object.__setattr__(self, "rates", q)
        object.__setattr__(self, "degrees", d)

    @classmethod
    def from_terms(cls, terms) -> "ExponentialSum":
        """From ``(weight, rate)`` or ``(weight, rate, degree)`` tuples."""
        terms = [tuple(t) + (0,) * (3 - len(t)) for t in terms]
        b, q, d = zip(*terms) if terms else ((), (), ())
        return cls(np.array(b, dtype=float), np.array(q, dtype=float), np.array(d, dtype=int))

    def __len__(self) -> int:
        return self.weights.size

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        tt = t[..., None]
        out = np.sum(self.weights * tt ** self.degrees * np.exp(-self.rates * tt), axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    def __mul__(self, other: "ExponentialSum") -> "ExponentialSum":
        b = np.outer(self.weights, other.weights).ravel()
        q = np.add.outer(self.rates, other.rates).ravel()
        d = np.add.outer(self.degrees, other.degrees).ravel()
        return ExponentialSum(b, q, d)

    def shift(self, h: float) -> "ExponentialSum":
        """``t -> f(t + h)``, re-expanded with the binomial theorem."""
        h = float(h)
        terms = []
        for b, q, d in zip(self.weights, self.rates, self.degrees):
            scale = b * math.exp(-q * h)
            for k in range(d + 1):
                terms.append((scale * math.comb(d, k) * h ** (d - k), q, k))
        return ExponentialSum.from_terms(terms)

    def _moments(self, z) -> complex:
        # sum_i b_i d_i! / (q_i + z)**(d_i + 1) = int_0^inf e^{-z t} f(t) dt
        fact = np.array([math.factorial(d) for d in self.degrees], dtype=float)
        return np.sum(self.weights * fact / (self.rates + z) ** (self.degrees + 1))

    def integral(self) -> float:
        return float(self._moments(0.0))

    def laplace(self, p: float) -> float:
        return float(self._moments(float(p)))

    def fourier(self, xi):
        """``int_0^inf e^{i xi t} f(t) dt``."""
        xi = np.asarray(xi, dtype=float)
        if xi.ndim == 0:
            return complex(self._moments(-1j * float(xi)))
        return np.array([complex(self._moments(-1j * x)) for x in xi])

    def weight_sum(self) -> float:
        """``f(0+)``: the sum of the degree-zero weights."""
        return float(np.sum(self.weights[self.degrees == 0]))


def eta_from_kernel(kern: GoursatKernel) -> ExponentialSum:
    """Moving-average kernel ``eta_n(t) = e^{-t/2} rho_n(e^t)``.

    ``eta = c0 e^{-t/2} + sum_j (a_j/lam_j) e^{-p_j t}`` with
    ``c0 = 1 - sum_j a_j/lam_j``; a zero exponent contributes ``-a_j t e^{-t/2}``.
    """
    terms = []
    c0 = 1.0
    for lam, a in zip(kern.lambdas, kern.a):
        if abs(lam) < ZERO_EXPONENT:
            terms.append((-a, 0.5, 1))
        else:
            c0 -= a / lam
            terms.append((a / lam, lam + 0.5, 0))
    return ExponentialSum.from_terms([(c0, 0.5, 0)] + terms)


@dataclass(frozen=True)
class BlaschkeProduct:
    """``Pi(xi) = prod_j (xi - i p_j) / (xi + i p_j)`` for ``p_j > 0``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if np.any(p <= 0):
            raise ValidationError("Blaschke zeros need p_j > 0")
        object.__setattr__(self, "p", p)

    @classmethod
    def from_kernel(cls, kern: GoursatKernel) -> "BlaschkeProduct":
        return cls(kern.lambdas + 0.5)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)[..., None]
        out = np.prod((xi - 1j * self.p) / (xi + 1j * self.p), axis=-1)
        return complex(out) if np.ndim(out) == 0 else out


def fourier_closed(bp: BlaschkeProduct, xi):
    """``(1/2 - i xi)^{-1} Pi(xi)``."""
    xi = np.asarray(xi, dtype=float)
    out = bp(xi) / (0.5 - 1j * xi)
    return complex(out) if np.ndim(out) == 0 else out


def fourier_partial_fractions(es: ExponentialSum, xi):
    """Fourier transform of ``es`` from its partial fractions ``b d!/(q - i xi)**(d+1)``."""
    return es.fourier(xi)


def ou_covariance(es: ExponentialSum, h: float) -> float:
    """``int_0^inf eta(r) eta(r + h) dr``; equals ``e^{-h/2}`` for a Müntz kernel."""
    h = float(h)
    if h < 0:
        raise DomainError("lag must be non-negative")
    return (es * es.shift(h)).integral()


def orthogonality_zero(es: ExponentialSum, p: float) -> float:
    """``int_0^inf e^{-p t} eta(t) dt``; zero when ``p`` is one of the kernel's ``p_j``."""
    p = float(p)
    if not p > 0:
        raise DomainError("need p > 0")
    return es.laplace(p)


# -- truncated infinite products ---------------------------------------------

def _eval_rule(rule: Callable, j: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        try:
            out = np.broadcast_to(np.asarray(rule(j), dtype=float), j.shape)
        except (TypeError, ValueError, OverflowError):
            out = np.array([float(rule(int(x))) for x in j])
    return out


def pi_infinity_truncated(p_rule: Callable, xi: float, N: int,
                          tail_majorant: Optional[Callable[[int], float]] = None,
                          check_convergence: bool = True,
                          tail_terms: int = DEFAULT_TAIL_TERMS) -> tuple[complex, float]:
    """Partial product of ``H(xi)`` over ``j <= N`` and a bound on the omitted tail.

    Each factor is ``(xi - i p_j)/(xi + i p_j) * |1 - p_j|/(1 - p_j)`` and the
    result carries the prefactor ``(1/2 - i xi)^{-1}``. Factors have unit
    modulus, so the remainder is a pure phase; the error is bounded by
    ``2 max(|xi|, 1/|xi|) S / |1/2 - i xi|`` where ``S = tail_majorant(N)`` must bound
    ``sum_{j>N} min(p_j, 1/p_j)``. Without a majorant the bound is ``inf``.

    Raises
    ------
    DomainError
        for ``xi == 0``, where the products are not controlled.
    NormalizationPole
        if some ``p_j`` equals 1.
    DivergentProduct
        if the Müntz-Szász series of ``p_rule`` is classified as divergent.
    """
    xi = float(xi)
    if xi == 0.0:
        raise DomainError("xi = 0 is excluded: convergence holds on compacts away from 0")
    if N < 0:
        raise ValidationError("N must be non-negative")
    if check_convergence:
        first = float(_eval_rule(p_rule, np.array([1.0]))[0])
        seq = validate([first - 0.5])
        cls = classify(seq, p_rule=lambda j: _eval_rule(p_rule, j), tail_terms=tail_terms)
        if cls.kind is SequenceKind.FiniteOrderOnly:
            raise DivergentProduct("Müntz-Szász condition fails: the product diverges")
    phase = 0.0
    if N:
        p = _eval_rule(p_rule, np.arange(1, N + 1, dtype=float))
        if np.any(p == 1.0):
            raise NormalizationPole(f"p_j = 1 at j = {int(np.flatnonzero(p == 1.0)[0]) + 1}")
        # an exact 0 is an underflowed p_j, whose factor is 1
        if np.any(~(p >= 0)):
            raise ValidationError("p_rule must produce positive values")
        angles = -2.0 * np.arctan2(p, xi) + np.where(p > 1.0, math.pi, 0.0)
        phase = math.fsum(angles)
    value = complex(np.exp(1j * phase) / (0.5 - 1j * xi))
    bound = math.inf
    if tail_majorant is not None:
        bound = 2.0 * max(abs(xi), 1.0 / abs(xi)) * float(tail_majorant(N)) / abs(0.5 - 1j * xi)
    return value, bound


def family_p_rule(family: dict) -> tuple[Callable, Callable[[int], float]]:
    """``(p_rule, tail_majorant)`` for the built-in exponent families."""
    p_rule = family_p_values(family)
    name = family.get("name")
    if name == "hyperharmonic":
        r = float(family["r"])
        if r <= 1:
            return p_rule, (lambda N: math.inf)
        # sum_{j>N} j**-r / 2 <= int_N^inf x**-r dx / 2 (for N >= 1)
        return p_rule, (lambda N: (max(N, 1) ** (1.0 - r) / (r - 1.0) + (1.0 if N == 0 else 0.0)) / 2.0)
    base = float(family["base"])
    small = min(base, 1.0 / base)
    # min(p_j, 1/p_j) = small**j, a geometric tail
    return p_rule, (lambda N: small ** (N + 1) / (1.0 - small))
