"""Command-line front end: ``muntz {coeffs,verify,classify,simulate,spectral,gram}``.

Every run prints its fully resolved configuration (defaults included) and the
package version in the output header. Values come from, in increasing
priority: built-in defaults, a ``--config`` JSON file, command-line flags.
``MUNTZ_SEED`` supplies the seed when neither of the latter does.

Exit codes: 0 success, 1 identity or Monte Carlo failure, 2 invalid input,
3 numerical conditioning failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any

import numpy as np

from . import __version__
from .errors import ConditioningError, InconclusiveClassification, ValidationError
from .exponents import classify, geometric_p_family, hyperharmonic_family, validate
from .gram import gram_pair
from .kernel import GoursatKernel, coefficients_system, goursat_kernel, system_residual
from .legendre import build_basis
from .spectral import BlaschkeProduct, family_p_rule, fourier_closed, pi_infinity_truncated
from .verify import run_identities

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CONDITIONING = 0, 1, 2, 3
MIN_VERDICT_PATHS = 64

COMMON = {"lambdas": None, "family": None, "r": None, "base": None, "n": None,
          "gap": 1e-6, "out": "csv"}
DEFAULTS = {
    "coeffs": {},
    "gram": {"t": 1.0},
    "verify": {"t": 1.0, "perturb": 0.0},
    "classify": {"tail_terms": 10**5},
    "simulate": {"T": 1.0, "grid": 1024, "paths": 16384, "seed": None, "iterate": 1,
                 "bridge": False},
    "spectral": {"xi_min": -10.0, "xi_max": 10.0, "xi_count": 25, "truncate": None},
}
# flags that change how, not what, is computed; kept out of the header
NOT_RESOLVED = {"workers", "output", "config"}


def _fmt(x: Any) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="muntz", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"muntz {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambdas", help="comma-separated exponents, e.g. 1,2")
    common.add_argument("--family", choices=["hyperharmonic", "geometric-p"])
    common.add_argument("--r", type=float, help="hyperharmonic parameter r > 0")
    common.add_argument("--base", type=float, help="geometric-p base (p_j = base**j)")
    common.add_argument("--n", type=int, help="kernel order (default: all listed exponents)")
    common.add_argument("--gap", type=float, help="minimum exponent separation (default 1e-6)")
    common.add_argument("--out", choices=["csv", "json"])
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument("--config", help="JSON file with any of the options above")

    sub.add_parser("coeffs", parents=[common], help="Müntz-Legendre and kernel coefficients")
    p = sub.add_parser("gram", parents=[common], help="covariance matrix and its inverse")
    p.add_argument("--t", type=float)
    p = sub.add_parser("verify", parents=[common], help="analytic identity residuals")
    p.add_argument("--t", type=float)
    p.add_argument("--perturb", type=float, help="add this to a_1 (test hook)")
    p = sub.add_parser("classify", parents=[common], help="Müntz-Szász / semimartingale class")
    p.add_argument("--tail-terms", dest="tail_terms", type=int)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo checks on Brownian paths")
    p.add_argument("--T", type=float)
    p.add_argument("--grid", type=int, help="number of time steps M")
    p.add_argument("--paths", type=int, help="number of paths P")
    p.add_argument("--seed", type=int)
    p.add_argument("--iterate", type=int, help="number of composed transforms m")
    p.add_argument("--bridge", action="store_true", default=None)
    p.add_argument("--workers", type=int, default=1)
    p = sub.add_parser("spectral", parents=[common], help="Fourier transform of the MA kernel")
    p.add_argument("--xi-min", dest="xi_min", type=float)
    p.add_argument("--xi-max", dest="xi_max", type=float)
    p.add_argument("--xi-count", dest="xi_count", type=int)
    p.add_argument("--truncate", type=int, help="partial product length for a family")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(COMMON)
    cfg.update(DEFAULTS[args.command])
    if args.config:
        with open(args.config) as fh:
            from_file = json.load(fh)
        unknown = set(from_file) - set(cfg)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(from_file)
    for key, value in vars(args).items():
        if key in cfg and value is not None:
            cfg[key] = value
    if args.command == "simulate" and cfg["seed"] is None:
        cfg["seed"] = int(os.environ.get("MUNTZ_SEED", 42))
    if args.command == "simulate":
        cfg["bridge"] = bool(cfg["bridge"])
    if cfg["lambdas"] is None and cfg["family"] is None:
        if args.command in ("coeffs", "verify", "simulate", "gram", "spectral"):
            cfg["lambdas"] = "1,2"
        else:
            raise ValidationError("give --lambdas or --family")
    cfg["command"] = args.command
    return cfg


def sequence_from_config(cfg: dict):
    gap = float(cfg["gap"])
    if cfg["family"] is not None:
        length = cfg["n"] if cfg["n"] is not None else (5 if cfg["command"] != "classify" else 1)
        length = max(int(length), 1)
        if cfg["family"] == "hyperharmonic":
            if cfg["r"] is None:
                raise ValidationError("--family hyperharmonic needs --r")
            return hyperharmonic_family(float(cfg["r"]), length, gap)
        if cfg["base"] is None:
            raise ValidationError("--family geometric-p needs --base")
        return geometric_p_family(float(cfg["base"]), length, gap)
    raw = cfg["lambdas"]
    values = raw if isinstance(raw, list) else [v for v in str(raw).split(",") if v.strip()]
    try:
        values = [float(v) for v in values]
    except ValueError as exc:
        raise ValidationError(f"cannot parse exponents {raw!r}") from exc
    return validate(values, gap)


class Report:
    """Collects rows and metadata, then renders CSV or JSON."""

    def __init__(self, cfg: dict, columns: list[str]):
        self.cfg = cfg
        self.columns = columns
        self.rows: list[list[Any]] = []
        self.meta: dict[str, Any] = {}
        self.notes: list[str] = []

    def add(self, *row):
        self.rows.append(list(row))

    def render(self) -> str:
        resolved = {k: v for k, v in sorted(self.cfg.items()) if k not in NOT_RESOLVED}
        if self.cfg["out"] == "json":
            doc = {"version": __version__, "config": resolved, "meta": self.meta,
                   "notes": self.notes,
                   "rows": [dict(zip(self.columns, r)) for r in self.rows]}
            return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"
        buf = io.StringIO()
        buf.write(f"# muntz {__version__}\n")
        buf.write(f"# config: {json.dumps(resolved, sort_keys=True)}\n")
        for key, value in self.meta.items():
            buf.write(f"# {key}: {json.dumps(value, default=_json_default)}\n")
        for note in self.notes:
            buf.write(f"# note: {note}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(type(obj).__name__)


# -- subcommands --------------------------------------------------------------

def cmd_coeffs(cfg: dict) -> tuple[Report, int]:
    seq = sequence_from_config(cfg)
    kern = goursat_kernel(seq, cfg["n"])
    basis = build_basis(seq, kern.n)
    rep = Report(cfg, ["quantity", "i", "j", "value"])
    for k, j, c in basis.rows():
        rep.add("c", k, j, c)
    solved = coefficients_system(seq, kern.n) if kern.n else np.zeros(0)
    for j, (a, b) in enumerate(zip(kern.a, solved), start=1):
        rep.add("a", j, "", a)
        rep.add("a_system", j, "", b)
    res = system_residual(kern.lambdas, kern.a)
    rep.add("system_residual", "", "", res)
    rep.meta["kernel"] = kern.to_dict()
    if seq.family and seq.family.get("name") == "hyperharmonic":
        r = seq.family["r"]
        idx = np.arange(1, kern.n + 1, dtype=float)
        fam = [k ** -r * np.prod([(j ** r + k ** r) / (j ** r - k ** r) for j in idx if j != k])
               for k in idx]
        for j, v in enumerate(fam, start=1):
            rep.add("a_family_formula", j, "", v)
        rep.notes.append("hyperharmonic family: a_k = k^-r prod_{j!=k} (j^r+k^r)/(j^r-k^r); "
                         "the variant with prefactor 2/k^r does not solve the linear system "
                         "(it is exactly twice these values)")
    return rep, EXIT_OK


def cmd_gram(cfg: dict) -> tuple[Report, int]:
    seq = sequence_from_config(cfg)
    kern = goursat_kernel(seq, cfg["n"])
    pair = gram_pair(kern, float(cfg["t"]))
    rep = Report(cfg, ["matrix", "row", "col", "value"])
    for name, mat in (("m", pair.m), ("alpha", pair.alpha)):
        for (i, j), v in np.ndenumerate(mat):
            rep.add(name, i + 1, j + 1, v)
    cond = pair.condition_number()
    rep.add("condition_number", "", "", cond)
    rep.add("inverse_residual", "", "", pair.residual)
    if cond > 1e12:
        rep.notes.append(f"covariance matrix is nearly singular (condition {cond:.3g})")
    return rep, EXIT_OK


def cmd_verify(cfg: dict) -> tuple[Report, int]:
    seq = sequence_from_config(cfg)
    kern = goursat_kernel(seq, cfg["n"])
    if cfg["perturb"]:
        a = kern.a.copy()
        a[0] += float(cfg["perturb"])
        kern = GoursatKernel(kern.seq, a)
    rep = Report(cfg, ["identity", "residual", "tolerance", "pass"])
    ok = True
    for check in run_identities(kern, float(cfg["t"])):
        rep.add(check.name, check.residual, check.tolerance, "pass" if check.passed else "FAIL")
        ok &= check.passed
    return rep, EXIT_OK if ok else EXIT_FAIL


def cmd_classify(cfg: dict) -> tuple[Report, int]:
    seq = sequence_from_config(cfg)
    result = classify(seq, tail_terms=int(cfg["tail_terms"]))
    rep = Report(cfg, ["quantity", "index", "value"])
    for key, value in result.summary().items():
        if key != "notes":
            rep.add(key, "", value)
    rep.notes.extend(result.notes)
    count = result.ms_partial_sums.size
    checkpoints = sorted({int(v) for v in np.geomspace(1, count, 26)})
    for N in checkpoints:
        rep.add("ms_partial", N, result.ms_partial_sums[N - 1])
        rep.add("p_partial", N, result.p_sum_partial[N - 1])
    return rep, EXIT_OK


def cmd_simulate(cfg: dict, workers: int = 1) -> tuple[Report, int]:
    from .pathsim import (bridge, brownian_statistics, generate, iterate, mc_product,
                          muntz_integrals, orthogonality_statistics, Statistic)

    seq = sequence_from_config(cfg)
    kern = goursat_kernel(seq, cfg["n"])
    T, M, P = float(cfg["T"]), int(cfg["grid"]), int(cfg["paths"])
    ens = generate(T, M, P, int(cfg["seed"]), workers)
    levels = iterate(ens, kern, int(cfg["iterate"]), workers)
    stats = []
    for k in range(1, len(levels)):
        stats += brownian_statistics(levels[k], prefix=f"T{k}:")
        stats += orthogonality_statistics(levels[k], levels[k - 1], kern, prefix=f"T{k}:")
    if cfg["bridge"] and kern.n:
        br = bridge(ens, kern, T)
        I = muntz_integrals(ens, kern.seq, kern.n, T)
        u = ens.t_grid[M // 2]
        for j, lam in enumerate(kern.lambdas):
            stats.append(Statistic(f"bridge:orth[u={u:g},lambda={lam:g}]",
                                   mc_product(br[:, M // 2], I[:, j]), 0.0))
    rep = Report(cfg, ["statistic", "estimate", "std_error", "target", "z_score"])
    for s in stats:
        rep.add(s.name, s.estimate.value, s.estimate.std_error, s.target, s.z_score)
    if P < MIN_VERDICT_PATHS:
        rep.notes.append(f"only {P} paths (< {MIN_VERDICT_PATHS}): no verdict")
        print(f"warning: only {P} paths, no pass/fail verdict", file=sys.stderr)
        return rep, EXIT_OK
    passed = all(s.passed() for s in stats)
    rep.meta["verdict"] = "pass" if passed else "fail"
    return rep, EXIT_OK if passed else EXIT_FAIL


def cmd_spectral(cfg: dict) -> tuple[Report, int]:
    xi = np.linspace(float(cfg["xi_min"]), float(cfg["xi_max"]), int(cfg["xi_count"]))
    truncate = cfg["truncate"]
    if truncate is None:
        seq = sequence_from_config(cfg)
        kern = goursat_kernel(seq, cfg["n"])
        rep = Report(cfg, ["xi", "re", "im", "abs"])
        values = np.atleast_1d(fourier_closed(BlaschkeProduct.from_kernel(kern), xi))
        for x, v in zip(xi, values):
            rep.add(x, v.real, v.imag, abs(v))
        return rep, EXIT_OK
    if cfg["family"] is None:
        raise ValidationError("--truncate needs --family (an infinite exponent sequence)")
    fam = sequence_from_config(cfg).family
    p_rule, majorant = family_p_rule(fam)
    rep = Report(cfg, ["xi", "re", "im", "abs", "tail_bound"])
    checked = False
    for x in xi:
        if x == 0.0:
            rep.add(x, math.nan, math.nan, math.nan, math.nan)
            rep.notes.append("xi = 0 excluded: partial products only converge away from 0")
            continue
        v, bound = pi_infinity_truncated(p_rule, x, int(truncate), majorant,
                                         check_convergence=not checked)
        checked = True
        rep.add(x, v.real, v.imag, abs(v), bound)
    return rep, EXIT_OK


COMMANDS = {"coeffs": cmd_coeffs, "gram": cmd_gram, "verify": cmd_verify,
            "classify": cmd_classify, "simulate": cmd_simulate, "spectral": cmd_spectral}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "simulate":
            rep, code = cmd_simulate(cfg, workers=args.workers)
        else:
            rep, code = COMMANDS[args.command](cfg)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConditioningError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONDITIONING
    except InconclusiveClassification as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = rep.render()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
