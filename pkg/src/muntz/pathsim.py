"""Monte Carlo simulation of Müntz transforms of Brownian motion.

Paths live on a uniform grid ``0 = t_0 < ... < t_M = T``. Deterministic
integrands are evaluated at cell midpoints ``s_i = (t_i + t_{i+1})/2``, which
keeps ``s**lam`` and ``rho(t/s)`` finite for negative exponents; the
increments themselves are Itô (forward) increments.

Every path draws from its own generator seeded by ``(seed, path_index)``, so
results do not depend on how paths are split across workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidGrid, NodeSingularity, ValidationError
from .exponents import ExponentSequence
from .gram import inverse_closed
from .kernel import GoursatKernel

#: paths per block; fixed so block results never depend on the worker count
BLOCK = 512


@dataclass(frozen=True)
class PathEnsemble:
    """``P`` Brownian-type paths given by their increments on a uniform grid."""

    t_grid: np.ndarray
    increments: np.ndarray
    master_seed: int
    label: str = "B"

    @property
    def P(self) -> int:
        return self.increments.shape[0]

    @property
    def M(self) -> int:
        return self.increments.shape[1]

    @property
    def T(self) -> float:
        return float(self.t_grid[-1])

    @property
    def dt(self) -> float:
        return self.T / self.M

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.t_grid[:-1] + self.t_grid[1:])

    def paths(self) -> np.ndarray:
        """``(P, M+1)`` array of path values, starting at 0."""
        out = np.zeros((self.P, self.M + 1))
        np.cumsum(self.increments, axis=1, out=out[:, 1:])
        return out

    def index(self, t: float) -> int:
        """Grid index of time ``t``; ``t`` must be a grid point."""
        k = int(round(float(t) / self.dt))
        if not 0 <= k <= self.M or abs(k * self.dt - t) > 1e-9 * max(1.0, self.T):
            raise InvalidGrid(f"t={t} is not a grid point")
        return k

    def values_at(self, t: float) -> np.ndarray:
        k = self.index(t)
        return self.increments[:, :k].sum(axis=1) if k else np.zeros(self.P)

    def coarsen(self, factor: int = 2) -> "PathEnsemble":
        """Same paths observed on every ``factor``-th grid point."""
        if self.M % factor:
            raise InvalidGrid("grid size not divisible by the coarsening factor")
        inc = self.increments.reshape(self.P, self.M // factor, factor).sum(axis=2)
        return replace(self, t_grid=self.t_grid[::factor], increments=inc)


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    paths_used: int

    def z_score(self, target: float) -> float:
        if not self.std_error > 0:
            return math.nan
        return (self.value - target) / self.std_error

    def within(self, target: float, n_se: float = 4.0) -> bool:
        return abs(self.value - target) <= n_se * self.std_error


def mc_mean(samples: np.ndarray) -> McEstimate:
    """Sample mean with standard error ``std/sqrt(P)``."""
    samples = np.asarray(samples, dtype=float)
    P = samples.size
    se = float(samples.std(ddof=1) / math.sqrt(P)) if P >= 2 else math.nan
    return McEstimate(float(samples.mean()), se, P)


def mc_product(x: np.ndarray, y: np.ndarray) -> McEstimate:
    """``E[XY]`` for centred ``X, Y`` (the covariance when means are known to be 0)."""
    return mc_mean(np.asarray(x) * np.asarray(y))


def _map_blocks(fn, P: int, workers: int):
    blocks = [(lo, min(lo + BLOCK, P)) for lo in range(0, P, BLOCK)]
    if workers <= 1 or len(blocks) == 1:
        return [fn(lo, hi) for lo, hi in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), blocks))


def path_generator(seed: int, index: int) -> np.random.Generator:
    """Independent stream for path ``index``, keyed on ``(seed, index)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def generate(T: float, M: int, P: int, seed: int, workers: int = 1) -> PathEnsemble:
    """Simulate ``P`` Brownian paths with ``M`` steps on ``[0, T]``."""
    if M < 2 or not T > 0:
        raise InvalidGrid("need M >= 2 and T > 0")
    if P < 1:
        raise ValidationError("need at least one path")
    dt = T / M
    sd = math.sqrt(dt)

    def block(lo, hi):
        return np.stack([path_generator(seed, p).standard_normal(M) for p in range(lo, hi)]) * sd

    inc = np.concatenate(_map_blocks(block, P, workers), axis=0)
    return PathEnsemble(np.linspace(0.0, T, M + 1), inc, int(seed))


def transform_matrix(kern: GoursatKernel, t_grid: np.ndarray) -> np.ndarray:
    """``R[k, i] = rho(t_{k+1}/s_i)`` for ``i <= k`` and 0 otherwise."""
    t = t_grid[1:]
    s = 0.5 * (t_grid[:-1] + t_grid[1:])
    ratio = t[:, None] / s[None, :]
    lower = np.tril(np.ones((t.size, s.size), dtype=bool))
    R = np.zeros(ratio.shape)
    R[lower] = kern.rho(ratio[lower])
    return R


def transform(ens: PathEnsemble, kern: GoursatKernel, workers: int = 1) -> PathEnsemble:
    """``T_n(B)_{t_k} = sum_{i<k} rho_n(t_k/s_i) dB_i`` on the ensemble grid.

    The order-0 kernel (``rho = 1``) returns the ensemble unchanged.
    """
    if kern.n == 0:
        return ens
    R = transform_matrix(kern, ens.t_grid)

    def block(lo, hi):
        vals = ens.increments[lo:hi] @ R.T
        return np.diff(vals, axis=1, prepend=0.0)

    inc = np.concatenate(_map_blocks(block, ens.P, workers), axis=0)
    return replace(ens, increments=inc, label=f"T({ens.label})")


def iterate(ens: PathEnsemble, kern: GoursatKernel, m: int, workers: int = 1) -> list[PathEnsemble]:
    """``[T^(0)(B), T^(1)(B), ..., T^(m)(B)]`` with ``T^(k) = T^(k-1) o T``."""
    if m < 0:
        raise ValidationError("iteration count must be >= 0")
    out = [ens]
    for _ in range(m):
        out.append(transform(out[-1], kern, workers))
    return out


def muntz_integrals(ens: PathEnsemble, seq: ExponentSequence, n: int | None, t: float,
                    node: str = "midpoint") -> np.ndarray:
    """Per-path ``int_0^t s**lam_j dB_s`` for ``j <= n``, shape ``(P, n)``.

    ``node`` is ``"midpoint"`` (default) or ``"left"``; the left rule cannot
    evaluate negative powers at ``s = 0``. A zero exponent gives ``B_t`` exactly.
    """
    lam = seq.array[: len(seq) if n is None else n]
    k = ens.index(t)
    if node == "midpoint":
        s = ens.midpoints[:k]
    elif node == "left":
        if np.any(lam < 0):
            raise NodeSingularity("left-point rule evaluates s**lam at s = 0 for lam < 0")
        s = ens.t_grid[:k]
    else:
        raise ValidationError(f"unknown node rule {node!r}")
    dB = ens.increments[:, :k]
    out = np.empty((ens.P, lam.size))
    for j, l in enumerate(lam):
        if l == 0.0:
            # telescoping sum: identical to the reconstructed path value B_t
            out[:, j] = np.cumsum(dB, axis=1)[:, -1] if k else 0.0
        else:
            with np.errstate(divide="ignore"):
                out[:, j] = dB @ np.power(s, l)
    return out


def bridge_weights(kern: GoursatKernel, u: np.ndarray, T: float) -> np.ndarray:
    """``psi_T(u) = alpha_T int_0^u f(r) dr`` for each ``u``; shape ``(len(u), n)``."""
    lam = kern.lambdas
    F = np.power(np.asarray(u, dtype=float)[:, None], lam + 1.0) / (lam + 1.0)
    return F @ inverse_closed(kern, T).T


def bridge(ens: PathEnsemble, kern: GoursatKernel, T: float | None = None) -> np.ndarray:
    """Generalised bridge ``B_u - psi_T(u) . int_0^T f dB`` on the grid ``u <= T``.

    Returns a ``(P, K+1)`` array where ``t_K = T``.
    """
    T = ens.T if T is None else float(T)
    k = ens.index(T)
    B = ens.paths()[:, : k + 1]
    if kern.n == 0:
        return B
    I = muntz_integrals(ens, kern.seq, kern.n, T)
    psi = bridge_weights(kern, ens.t_grid[: k + 1], T)
    return B - I @ psi.T


def bridge_defect(ens: PathEnsemble, kern: GoursatKernel, T: float | None = None) -> np.ndarray:
    """Per-path ``int_0^T s**lam_j dB^br_s`` (midpoint sums); ``(P, n)``, zero up to
    discretisation error."""
    T = ens.T if T is None else float(T)
    k = ens.index(T)
    br = bridge(ens, kern, T)
    dbr = np.diff(br, axis=1)
    s = ens.midpoints[:k]
    return dbr @ np.power(s[:, None], kern.lambdas)


def bridge_convergence(kern: GoursatKernel, T: float, M: int, P: int, seed: int,
                       workers: int = 1) -> tuple[float, float, float]:
    """RMS bridge defect on grids ``M`` and ``2M`` for the same Brownian paths.

    Returns ``(rms_M, rms_2M, rms_M / rms_2M)``.
    """
    fine = generate(T, 2 * M, P, seed, workers)
    coarse = fine.coarsen(2)
    rms = [float(np.sqrt(np.mean(bridge_defect(e, kern, T) ** 2))) for e in (coarse, fine)]
    return rms[0], rms[1], rms[0] / rms[1]


# -- statistics ---------------------------------------------------------------

PROBE_PAIRS = ((0.25, 1.0), (0.5, 1.0), (0.5, 0.75))


@dataclass(frozen=True)
class Statistic:
    name: str
    estimate: McEstimate
    target: float

    @property
    def z_score(self) -> float:
        return self.estimate.z_score(self.target)

    def passed(self, n_se: float = 4.0) -> bool:
        return self.estimate.within(self.target, n_se)


def brownian_statistics(ens: PathEnsemble, pairs=PROBE_PAIRS, prefix: str = "") -> list[Statistic]:
    """Variance at ``T`` and covariances at ``pairs`` against ``min(s, t)``."""
    X = ens.paths()
    out = [Statistic(f"{prefix}var[{ens.T:g}]", mc_product(X[:, -1], X[:, -1]), ens.T)]
    for s, t in pairs:
        if s > ens.T or t > ens.T:
            continue
        est = mc_product(X[:, ens.index(s)], X[:, ens.index(t)])
        out.append(Statistic(f"{prefix}cov[{s:g},{t:g}]", est, min(s, t)))
    return out


def orthogonality_statistics(out: PathEnsemble, source: PathEnsemble, kern: GoursatKernel,
                             t: float | None = None, prefix: str = "") -> list[Statistic]:
    """``E[out_t int_0^t s**lam_j d(source)_s]`` for each ``j``; target 0."""
    t = out.T if t is None else t
    X = out.values_at(t)
    I = muntz_integrals(source, kern.seq, kern.n, t)
    return [Statistic(f"{prefix}orth[lambda={lam:g}]", mc_product(X, I[:, j]), 0.0)
            for j, lam in enumerate(kern.lambdas)]
