"""Müntz exponent sequences: validation, standard families, classification.

A sequence ``lambdas`` defines the powers ``x**lam`` spanning a Müntz space.
Every exponent must exceed -1/2 so that the powers are square integrable
near zero, and exponents must be pairwise separated: the closed-form
coefficient formulas divide by their differences.

Infinite sequences are represented by a finite stored prefix together with
an *extension rule* ``j -> lambda_j`` (1-based), which :func:`classify` uses
to decide the Müntz-Szász and semimartingale criteria numerically.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DuplicateExponent, ExponentOutOfRange, InconclusiveClassification, ValidationError

DEFAULT_GAP = 1e-8
DEFAULT_TAIL_TERMS = 10**5

ExtensionRule = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ExponentSequence:
    """Validated, ordered list of Müntz exponents.

    Use :func:`validate` (or the family constructors) rather than the raw
    constructor, which does not check anything.
    """

    lambdas: tuple[float, ...]
    gap_epsilon: float = DEFAULT_GAP
    family: Optional[dict] = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.lambdas)

    def __getitem__(self, item):
        return self.lambdas[item]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.lambdas, dtype=float)

    @property
    def p(self) -> np.ndarray:
        """Shifted exponents ``lambda + 1/2`` (all strictly positive)."""
        return self.array + 0.5

    def prefix(self, n: int) -> "ExponentSequence":
        return ExponentSequence(self.lambdas[:n], self.gap_epsilon, self.family)

    def extension_rule(self) -> Optional[ExtensionRule]:
        """Closed-form rule ``j -> lambda_j`` for family-generated sequences."""
        if self.family is None:
            return None
        return family_rule(self.family)

    def to_dict(self) -> dict:
        return {"lambdas": list(self.lambdas), "family": self.family}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, gap_epsilon: float = DEFAULT_GAP) -> "ExponentSequence":
        return validate(data["lambdas"], gap_epsilon, family=data.get("family"))

    @classmethod
    def from_json(cls, text: str, gap_epsilon: float = DEFAULT_GAP) -> "ExponentSequence":
        return cls.from_dict(json.loads(text), gap_epsilon)


def validate(lambdas: Sequence[float], gap_epsilon: float = DEFAULT_GAP,
             family: Optional[dict] = None) -> ExponentSequence:
    """Check the exponent constraints and return an immutable sequence.

    Input order is preserved: Müntz-Legendre polynomials depend on it.

    Raises
    ------
    ExponentOutOfRange
        if some exponent is <= -1/2 (or not finite).
    DuplicateExponent
        if two exponents are closer than ``gap_epsilon``.
    """
    lams = tuple(float(x) for x in lambdas)
    if not lams:
        raise ValidationError("exponent list is empty")
    for j, lam in enumerate(lams, start=1):
        if not math.isfinite(lam) or lam <= -0.5:
            raise ExponentOutOfRange(f"lambda_{j} = {lam!r} must be finite and > -1/2")
    arr = np.asarray(lams)
    order = np.argsort(arr, kind="stable")
    gaps = np.diff(arr[order])
    if gaps.size and gaps.min() < gap_epsilon:
        i = int(np.argmin(gaps))
        j, k = sorted((int(order[i]) + 1, int(order[i + 1]) + 1))
        raise DuplicateExponent(
            f"lambda_{j} and lambda_{k} differ by {gaps[i]:.3g} < gap {gap_epsilon:.3g}")
    return ExponentSequence(lams, float(gap_epsilon), family)


# -- families ---------------------------------------------------------------

def family_p_values(family: dict) -> ExtensionRule:
    """``j -> p_j = lambda_j + 1/2`` for a named family, without cancellation."""
    name = family.get("name")
    if name == "hyperharmonic":
        r = float(family["r"])
        return lambda j: np.asarray(j, dtype=float) ** -r / 2.0
    if name == "geometric-p":
        base = float(family["base"])
        return lambda j: np.power(base, np.asarray(j, dtype=float))
    raise ValidationError(f"unknown exponent family {name!r}")


def family_rule(family: dict) -> ExtensionRule:
    """``j -> lambda_j`` for a named family."""
    p = family_p_values(family)
    return lambda j: p(j) - 0.5


def hyperharmonic_family(r: float, n: int, gap_epsilon: float = DEFAULT_GAP) -> ExponentSequence:
    """``lambda_j = (j**-r - 1)/2`` for ``j = 1..n``, i.e. ``p_j = j**-r / 2``."""
    if not r > 0:
        raise ValidationError("hyperharmonic family needs r > 0")
    if n < 1:
        raise ValidationError("need n >= 1")
    fam = {"name": "hyperharmonic", "r": float(r)}
    return validate(family_rule(fam)(np.arange(1, n + 1)), gap_epsilon, family=fam)


def geometric_p_family(base: float, n: int, gap_epsilon: float = DEFAULT_GAP) -> ExponentSequence:
    """``p_j = base**j`` (so ``lambda_j = base**j - 1/2``); unbounded for base > 1."""
    if not base > 0 or base == 1:
        raise ValidationError("geometric-p family needs base > 0, base != 1")
    if n < 1:
        raise ValidationError("need n >= 1")
    fam = {"name": "geometric-p", "base": float(base)}
    return validate(family_rule(fam)(np.arange(1, n + 1)), gap_epsilon, family=fam)


# -- classification -----------------------------------------------------------

class SequenceKind(enum.Enum):
    FiniteOrderOnly = "FiniteOrderOnly"
    InfiniteOrderNonSemimartingale = "InfiniteOrderNonSemimartingale"
    InfiniteOrderSemimartingale = "InfiniteOrderSemimartingale"


@dataclass(frozen=True)
class SeriesVerdict:
    """Outcome of the convergence heuristic for one positive series."""

    converges: Optional[bool]
    partial_n: float
    partial_2n: float
    decay_exponent: float
    tail_estimate: float
    reason: str


@dataclass(frozen=True)
class SequenceClass:
    kind: SequenceKind
    ms_partial_sums: np.ndarray
    p_sum_partial: np.ndarray
    ms: Optional[SeriesVerdict] = None
    p_sum: Optional[SeriesVerdict] = None
    bounded: Optional[bool] = None
    sup_lambda: float = float("nan")
    criteria_agree: Optional[bool] = None
    notes: tuple[str, ...] = ()

    @property
    def name(self) -> str:
        return self.kind.value

    def summary(self) -> dict:
        out = {"class": self.name, "terms": int(self.ms_partial_sums.size),
               "ms_sum": float(self.ms_partial_sums[-1]),
               "p_sum": float(self.p_sum_partial[-1]),
               "bounded": self.bounded, "sup_lambda": self.sup_lambda,
               "criteria_agree": self.criteria_agree, "notes": list(self.notes)}
        for key, v in (("ms", self.ms), ("p_sum", self.p_sum)):
            if v is not None:
                out[f"{key}_converges"] = v.converges
                out[f"{key}_decay_exponent"] = v.decay_exponent
                out[f"{key}_tail_estimate"] = v.tail_estimate
                out[f"{key}_reason"] = v.reason
        return out


def muntz_szasz_terms(p: np.ndarray) -> np.ndarray:
    """``p / (p**2 + 1)``, written so that ``p = inf`` gives 0 instead of nan."""
    p = np.asarray(p, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        return 1.0 / (p + 1.0 / p)


# Thresholds on the fitted power-law decay t_j ~ C j**-alpha over the last decade.
_CONVERGENT_ALPHA = 1.1
_DIVERGENT_ALPHA = 1.02
_GROWTH_EXPONENT = 0.05


def _log_slope(values: np.ndarray, j: np.ndarray) -> float:
    """Least-squares slope of log(values) against log(j)."""
    x = np.log(j)
    y = np.log(values)
    x = x - x.mean()
    return float(np.dot(x, y - y.mean()) / np.dot(x, x))


def series_verdict(terms: np.ndarray, tail_bound: Optional[Callable[[int], float]] = None
                   ) -> SeriesVerdict:
    """Decide convergence of ``sum(terms)`` from its first ``2N`` terms.

    The partial sums at ``N`` and ``2N`` are compared, and the decay of the
    terms over the last decade ``[2N/10, 2N]`` is fitted to a power law
    ``C j**-alpha``. ``alpha >= 1.1`` (or terms underflowing to zero) counts as
    convergent, ``alpha <= 1.02`` with terms bounded below by ``c/j`` counts as
    divergent, anything else is left undecided (``converges=None``). A
    user-supplied ``tail_bound(N) >= sum_{j>N} t_j`` must be consistent with
    the observed increment, otherwise the verdict is undecided as well.
    """
    terms = np.asarray(terms, dtype=float)
    n2 = terms.size
    n = n2 // 2
    with np.errstate(over="ignore", invalid="ignore"):
        sums = np.cumsum(terms)
    s_n, s_2n = float(sums[n - 1]), float(sums[-1])
    increment = s_2n - s_n
    j = np.arange(1, n2 + 1, dtype=float)
    window = slice(max(n2 // 10, 1) - 1, n2)
    last = terms[window]

    if not np.all(np.isfinite(last)):
        return SeriesVerdict(False, s_n, s_2n, -math.inf, math.inf, "terms are not finite")
    zero = last == 0.0
    if zero.any() and np.all(zero[int(np.argmax(zero)):]) and np.all(last[~zero] > 0.0):
        # positive terms that run into a trailing block of underflowed zeros
        return SeriesVerdict(True, s_n, s_2n, math.inf, 0.0, "terms underflow to zero")
    if np.any(last <= 0.0):
        return SeriesVerdict(None, s_n, s_2n, math.nan, math.nan, "terms not strictly positive")

    alpha = -_log_slope(last, j[window])
    tail = math.inf
    if alpha > 1.0:
        tail = float(terms[-1] * n2 / (alpha - 1.0))

    if alpha >= _CONVERGENT_ALPHA:
        if tail_bound is not None and increment > tail_bound(n) * (1 + 1e-12):
            return SeriesVerdict(None, s_n, s_2n, alpha, tail,
                                 "increment exceeds the supplied analytic tail bound")
        if tail_bound is not None:
            tail = min(tail, float(tail_bound(n2)))
        return SeriesVerdict(True, s_n, s_2n, alpha, tail,
                             f"terms decay like j^-{alpha:.3g} (increment {increment:.3g})")
    if alpha <= _DIVERGENT_ALPHA and float(np.min(last * j[window])) > 0.0:
        return SeriesVerdict(False, s_n, s_2n, alpha, math.inf,
                             f"terms decay no faster than c/j (alpha={alpha:.3g})")
    return SeriesVerdict(None, s_n, s_2n, alpha, tail, f"decay exponent {alpha:.3g} is borderline")


def _extended_p(seq: ExponentSequence, rule: ExtensionRule, count: int,
                shifted: bool) -> np.ndarray:
    """``p_j = lambda_j + 1/2`` for ``j = 1..count``; the rule yields lambda or,
    with ``shifted``, p directly (which keeps precision for tiny p)."""
    p = np.empty(count)
    k = min(len(seq), count)
    p[:k] = seq.p[:k]
    if count > k:
        j = np.arange(k + 1, count + 1, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            try:
                vals = np.broadcast_to(np.asarray(rule(j), dtype=float), j.shape)
            except (TypeError, ValueError, OverflowError):
                vals = np.array([_scalar_rule(rule, int(x)) for x in j])
        p[k:] = vals if shifted else vals + 0.5
    # an exact 0 can only come from underflow of a positive rule value
    bad = np.flatnonzero(~(p >= 0))
    if bad.size:
        raise ExponentOutOfRange(
            f"extension rule gives lambda_{bad[0] + 1} = {p[bad[0]] - 0.5!r} <= -1/2")
    return p


def _scalar_rule(rule: ExtensionRule, j: int) -> float:
    try:
        return float(rule(j))
    except OverflowError:
        return math.inf


def classify(seq: ExponentSequence, extension_rule: Optional[ExtensionRule] = None,
             tail_terms: int = DEFAULT_TAIL_TERMS, p_rule: Optional[ExtensionRule] = None,
             ms_tail_bound: Optional[Callable[[int], float]] = None,
             raise_inconclusive: bool = True) -> SequenceClass:
    """Classify an exponent sequence by the Müntz-Szász and semimartingale criteria.

    Parameters
    ----------
    seq : ExponentSequence
        Stored prefix. If ``extension_rule`` is omitted the family rule of a
        family-generated sequence is used; a plain finite list is reported as
        ``FiniteOrderOnly`` with its partial sums only.
    extension_rule : callable, optional
        ``j -> lambda_j`` for 1-based ``j``; called with a float array where
        possible, element-wise otherwise.
    tail_terms : int
        ``N``; partial sums are formed up to ``2N`` terms.
    p_rule : callable, optional
        Alternative to ``extension_rule`` giving ``p_j = lambda_j + 1/2``;
        preferable when ``p_j`` is tiny.
    ms_tail_bound : callable, optional
        Analytic bound ``N -> sum_{j>N} p_j/(p_j**2+1)`` used to confirm
        convergence.
    raise_inconclusive : bool
        Raise :class:`InconclusiveClassification` when the heuristic cannot
        decide the Müntz-Szász series; otherwise return with ``kind``
        ``FiniteOrderOnly`` and a note.

    Returns
    -------
    SequenceClass
    """
    shifted = p_rule is not None
    rule = p_rule if shifted else extension_rule
    if rule is None and seq.family is not None:
        rule, shifted = family_p_values(seq.family), True
    if rule is None:
        p = seq.p
        return SequenceClass(SequenceKind.FiniteOrderOnly,
                             np.cumsum(muntz_szasz_terms(p)), np.cumsum(p),
                             bounded=True, sup_lambda=float(seq.array.max()),
                             notes=("finite sequence: every order n <= len is realisable",))
    if tail_terms < 10:
        raise ValidationError("tail_terms must be at least 10")

    p = _extended_p(seq, rule, 2 * tail_terms, shifted)
    ms_terms = muntz_szasz_terms(p)
    with np.errstate(over="ignore", invalid="ignore"):
        ms_partial = np.cumsum(ms_terms)
        p_partial = np.cumsum(p)

    ms = series_verdict(ms_terms, ms_tail_bound)
    psum = series_verdict(p)
    bounded, sup_lam = _boundedness(p)
    notes = []

    if ms.converges is None:
        msg = f"Müntz-Szász series undecided: {ms.reason}"
        if raise_inconclusive:
            raise InconclusiveClassification(msg)
        notes.append(msg)
        kind = SequenceKind.FiniteOrderOnly
    elif not ms.converges:
        kind = SequenceKind.FiniteOrderOnly
    elif bounded:
        kind = SequenceKind.InfiniteOrderSemimartingale
    else:
        kind = SequenceKind.InfiniteOrderNonSemimartingale

    agree = None
    if psum.converges is not None and ms.converges is not None:
        agree = psum.converges == (kind is SequenceKind.InfiniteOrderSemimartingale)
        if not agree:
            notes.append("sum p_j criterion disagrees with 'bounded + Müntz-Szász'")
    return SequenceClass(kind, ms_partial, p_partial, ms, psum, bounded, sup_lam, agree,
                         tuple(notes))


def _boundedness(p: np.ndarray) -> tuple[bool, float]:
    """Bounded unless ``p_j`` is infinite or grows like a power of ``j`` at the end."""
    sup_lam = float(np.max(p)) - 0.5
    if not math.isfinite(sup_lam):
        return False, sup_lam
    n2 = p.size
    j = np.arange(1, n2 + 1, dtype=float)[max(n2 // 10, 1) - 1:]
    last = p[max(n2 // 10, 1) - 1:]
    keep = last > 0
    if keep.sum() < 2:
        return True, sup_lam
    growth = _log_slope(last[keep], j[keep])
    return growth <= _GROWTH_EXPONENT, sup_lam
