"""Command-line entry point: ``opmono check | sweep | region | verify | mc``.

Exit codes: 0 on success (whatever the verdict), 1 on invalid input, 2 on an
internal numeric inconsistency.  All output is deterministic for a fixed
``--seed``.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from .boundary import NumericInconsistencyError, classify_numeric, ray_sweep, write_profile_csv
from .exponents import (
    ArgWitness,
    ExponentSpec,
    LoewnerWitness,
    Mode,
    Status,
    cancel_common_factors,
    check_sufficient,
    check_szabo,
    validate_spec,
)
from .families import (
    FamilyStatus,
    f_a_function,
    h1_classify,
    h1_function,
    h2_classify,
    h2_function,
    h2_to_ratio_spec,
    mc_build,
    mc_eval,
)
from .loewner import (
    EvalOptions,
    SearchBudget,
    chebyshev_points,
    loewner_test,
    matrix_pair_probe,
    witness_search,
)
from .ratio import RatioFunction

DEFAULT_SEED = 20240101
MAX_GRID = 2000


class UsageError(Exception):
    """Invalid command-line input (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------


def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def dumps(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits; non-finite floats become ``null``."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _witness_json(w):
    if w is None:
        return None
    if isinstance(w, ArgWitness):
        return {"kind": "boundary-arg", "r": w.r, "theta": w.theta, "arg_over_pi": w.arg_over_pi,
                "violation": w.violation, "im_value": w.im_value}
    if isinstance(w, LoewnerWitness):
        return {"kind": "loewner", "points": list(w.points), "min_eigenvalue": w.min_eigenvalue,
                "violation": w.violation}
    raise TypeError(type(w).__name__)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def parse_list(text: str) -> tuple[float, ...]:
    """Comma-separated decimals; the empty string is the empty list."""
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def _positive(text: str) -> float:
    v = _finite(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _nonneg(text: str) -> float:
    v = _finite(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return v


def _count(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text!r}")
    return v


def _add_spec(p, gamma=True):
    if gamma:
        p.add_argument("--gamma", type=_finite, default=0.0)
    p.add_argument("--alpha", type=parse_list, default=())
    p.add_argument("--beta", type=parse_list, default=())


def _add_sweep(p):
    p.add_argument("--rmin", type=_positive, default=1e-8)
    p.add_argument("--rmax", type=_positive, default=1e8)
    p.add_argument("--samples", type=_count, default=4096)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opmono", description="Operator monotonicity of power-ratio functions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="decide operator monotonicity of f**s")
    _add_spec(p)
    _add_sweep(p)
    p.add_argument("--s", type=_positive, default=1.0)
    p.add_argument("--margin", type=_nonneg, default=1e-3)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--no-cross-check", action="store_true", help="skip the Loewner witness search")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json"], default="json")

    p = sub.add_parser("sweep", help="boundary argument profile along the negative axis")
    _add_spec(p, gamma=False)
    _add_sweep(p)
    p.add_argument("--out", help="CSV path; the JSON sidecar goes next to it")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("region", help="classify a parameter grid")
    p.add_argument("--family", choices=["h1", "h2", "general-thm22"], required=True)
    p.add_argument("--grid", type=_count, default=81, help="points per axis")
    p.add_argument("--amin", type=_finite)
    p.add_argument("--amax", type=_finite)
    p.add_argument("--bmin", type=_finite)
    p.add_argument("--bmax", type=_finite)
    p.add_argument("--gamma", type=_finite, default=0.0, help="gamma for general-thm22 cells")
    p.add_argument("--margin", type=_nonneg, default=1e-3)
    p.add_argument("--samples", type=_count, default=1024)
    p.add_argument("--evidence", action="store_true",
                   help="add the boundary-engine verdict for h2 cells as a separate column")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("verify", help="Loewner matrix and random matrix-pair checks")
    _add_spec(p)
    p.add_argument("--family", choices=["spec", "f_a", "h1", "h2"], default="spec")
    p.add_argument("--a", type=_finite)
    p.add_argument("--b", type=_finite)
    p.add_argument("--s", type=_positive, default=1.0)
    p.add_argument("--points", type=_count, default=8)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--trials", type=_count, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--search", action="store_true", help="also run the Loewner witness search")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json"], default="json")

    p = sub.add_parser("mc", help="Morozova-Chentsov function c(lambda, mu)")
    _add_spec(p, gamma=False)
    p.add_argument("--lam", type=_positive, default=1.0)
    p.add_argument("--mu", type=_positive, default=1.0)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json"], default="json")
    return parser


def _spec(args, gamma: float | None = None) -> ExponentSpec:
    g = args.gamma if gamma is None else gamma
    if len(args.alpha) != len(args.beta):
        raise UsageError("--alpha and --beta need the same number of entries")
    return ExponentSpec(g, args.alpha, args.beta)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def run_check(args) -> tuple[dict, int]:
    spec = _spec(args)
    problems = [v for v in validate_spec(spec, Mode.ANALYTIC) if "cancel" not in v.message]
    fatal = [v for v in problems if not v.proves_not_monotone]
    if fatal:
        raise UsageError("; ".join(v.message for v in fatal))
    result = {
        "verdict": None, "method": None, "certificate": None, "szabo_passes": None,
        "F0_est": None, "G0_est": None, "witness": None, "margin": args.margin, "s": args.s,
    }
    if problems:
        if args.s != 1:
            raise UsageError("necessary-condition rejection applies to s = 1 only")
        result.update(verdict=Status.PROVED_NOT_MONOTONE.value, method="prop-3.1",
                      reasons=[v.message for v in problems])
        return result, 0

    spec = cancel_common_factors(spec)
    suff = check_sufficient(spec)
    cert = suff.certificate
    result["certificate"] = {"lower_sum": cert.lower_sum, "upper_sum": cert.upper_sum}
    result["szabo_passes"] = check_szabo(spec).status is Status.PROVED_MONOTONE
    proved = suff.status is Status.PROVED_MONOTONE and args.s <= 1

    numeric = None
    if not validate_spec(spec, Mode.NUMERIC):
        numeric = classify_numeric(spec, args.s, args.margin, r_min=args.rmin, r_max=args.rmax,
                                   n_samples=args.samples)
        result["F0_est"] = numeric.details["F0_est"]
        result["G0_est"] = numeric.details["G0_est"]
        if proved and numeric.status is Status.NUMERIC_NOT_MONOTONE:
            raise NumericInconsistencyError("sufficient condition holds but the boundary engine "
                                            "found a violation")

    if proved:
        result.update(verdict=Status.PROVED_MONOTONE.value, method="thm-1.1")
    elif numeric is not None and numeric.status is not Status.INCONCLUSIVE:
        result.update(verdict=numeric.status.value, method=numeric.method,
                      witness=_witness_json(numeric.witness))
    else:
        result.update(verdict=Status.INCONCLUSIVE.value,
                      method=numeric.method if numeric is not None else "thm-1.1")

    if not args.no_cross_check and result["verdict"] != Status.NUMERIC_NOT_MONOTONE.value:
        lw = witness_search(spec, SearchBudget(seed=args.seed), EvalOptions(power_s=args.s))
        result["loewner_cross_check"] = _witness_json(lw)
        if lw is not None:
            if result["verdict"] == Status.PROVED_MONOTONE.value:
                raise NumericInconsistencyError("proved monotone yet a Loewner witness exists")
            if result["verdict"] == Status.INCONCLUSIVE.value:
                result.update(verdict=Status.NUMERIC_NOT_MONOTONE.value, method="loewner-witness",
                              witness=_witness_json(lw))
    return result, 0


def run_sweep(args) -> tuple[str, int]:
    spec = _spec(args, gamma=0.0)
    prof = ray_sweep(spec, args.rmin, args.rmax, args.samples)
    sidecar = {
        "F0_est": prof.F0_est,
        "G0_est": prof.G0_est,
        "theta_lower": prof.theta_lower,
        "Theta_upper": prof.Theta_upper,
        "limit_zero": prof.limit_zero,
        "limit_infinity": prof.limit_infinity,
        "resolution": prof.grid_resolution,
        "tail_error": prof.tail_error,
        "samples": len(prof.log10_r),
    }
    buf = io.StringIO()
    write_profile_csv(prof, buf)
    side_text = dumps(sidecar) + "\n"
    if args.out:
        out = Path(args.out)
        out.write_text(buf.getvalue(), encoding="utf-8", newline="\n")
        out.with_suffix(".json").write_text(side_text, encoding="utf-8", newline="\n")
        return side_text, 0
    return (side_text if args.format == "json" else buf.getvalue()), 0


_REGION_DEFAULTS = {
    "h1": (-2.0, 2.0, -2.0, 2.0),
    "h2": (-0.5, 1.5, -1.5, 0.5),
    "general-thm22": (0.05, 1.95, 0.05, 1.95),
}

_CODES = {
    FamilyStatus.MONOTONE: "monotone",
    FamilyStatus.NOT_MONOTONE: "not_monotone",
    FamilyStatus.UNKNOWN: "unknown",
    Status.NUMERIC_MONOTONE: "monotone",
    Status.NUMERIC_NOT_MONOTONE: "not_monotone",
    Status.INCONCLUSIVE: "inconclusive",
}


def _axis(lo, hi, n):
    # round so that decimal grids print as decimals
    return [round(float(v), 12) + 0.0 for v in np.linspace(lo, hi, n)]


def run_region(args) -> tuple[str, int]:
    if args.grid > MAX_GRID:
        raise UsageError(f"--grid must be at most {MAX_GRID}")
    d = _REGION_DEFAULTS[args.family]
    amin = d[0] if args.amin is None else args.amin
    amax = d[1] if args.amax is None else args.amax
    bmin = d[2] if args.bmin is None else args.bmin
    bmax = d[3] if args.bmax is None else args.bmax
    if not (amin <= amax and bmin <= bmax):
        raise UsageError("empty parameter range")
    if args.family == "h1" and max(abs(amin), abs(amax), abs(bmin), abs(bmax)) > 2:
        raise UsageError("h1 is classified for |a|, |b| <= 2")
    if args.family == "general-thm22" and not (0 < amin and amax < 2 and 0 < bmin and bmax < 2):
        raise UsageError("general-thm22 cells need exponents in (0, 2)")

    header = ["a", "b", "code"] + (["evidence"] if args.evidence else [])
    rows = []
    for b in _axis(bmax, bmin, args.grid):
        for a in _axis(amin, amax, args.grid):
            row = [a, b]
            if math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12):
                row.append("degenerate")
            elif args.family == "h1":
                row.append(_CODES[h1_classify(a, b).status])
            elif args.family == "h2":
                row.append(_CODES[h2_classify(a, b).status])
            else:
                v = classify_numeric(ExponentSpec(args.gamma, (a,), (b,)), margin=args.margin,
                                     n_samples=args.samples)
                row.append(_CODES[v.status])
            if args.evidence:
                row.append(_h2_evidence(a, b, args) if args.family == "h2" else "")
            rows.append(row)
    if args.format == "json":
        return dumps([dict(zip(header, r)) for r in rows]) + "\n", 0
    return _csv_text(header, rows), 0


def _h2_evidence(a, b, args) -> str:
    if not (0 < a <= 1 and -1 <= b < 0) or math.isclose(a, -b):
        return ""
    spec = h2_to_ratio_spec(a, b).spec
    if validate_spec(spec, Mode.NUMERIC):
        return ""
    return _CODES[classify_numeric(spec, margin=args.margin, n_samples=args.samples).status]


def _verify_target(args):
    fam = args.family
    if fam == "spec":
        spec = _spec(args)
        bad = [v for v in validate_spec(cancel_common_factors(spec), Mode.ANALYTIC)
               if not v.proves_not_monotone]
        if bad:
            raise UsageError("; ".join(v.message for v in bad))
        return spec, {"gamma": spec.gamma, "alpha": list(spec.alphas), "beta": list(spec.betas)}
    if args.a is None:
        raise UsageError(f"--family {fam} needs --a")
    if fam == "f_a":
        if not -1 <= args.a <= 2:
            raise UsageError("f_a needs a in [-1, 2]")
        return f_a_function(args.a), {"family": fam, "a": args.a}
    if args.b is None:
        raise UsageError(f"--family {fam} needs --b")
    if args.a == args.b:
        raise UsageError("need a != b")
    if fam == "h1":
        if max(abs(args.a), abs(args.b)) > 2:
            raise UsageError("h1 needs |a|, |b| <= 2")
        return h1_function(args.a, args.b), {"family": fam, "a": args.a, "b": args.b}
    return h2_function(args.a, args.b), {"family": fam, "a": args.a, "b": args.b}


def run_verify(args) -> tuple[dict, int]:
    if not 2 <= args.dim <= 12:
        raise UsageError("--dim must lie in [2, 12]")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    func, target = _verify_target(args)
    opts = EvalOptions(power_s=args.s)
    pts = chebyshev_points(args.points)
    rep = loewner_test(func, pts, opts)
    probe = matrix_pair_probe(func, args.dim, args.trials, args.seed, opts)
    witness = None
    if not rep.psd:
        witness = LoewnerWitness(rep.points, rep.min_eigenvalue, -rep.relative_min_eigenvalue)
    elif args.search:
        witness = witness_search(func, SearchBudget(seed=args.seed), opts)
    result = {
        "target": target,
        "s": args.s,
        "loewner": {
            "points": list(rep.points),
            "min_eigenvalue": rep.min_eigenvalue,
            "relative_min_eigenvalue": rep.relative_min_eigenvalue,
            "psd": rep.psd,
            "tolerance": rep.tolerance,
        },
        "probe": {
            "dimension": probe.dimension,
            "trials": probe.trials,
            "seed": probe.seed,
            "violations": probe.violations,
            "worst_min_eigenvalue": probe.worst_min_eigenvalue,
            "tolerance": probe.tolerance,
        },
        "witness": _witness_json(witness),
    }
    if probe.witness is not None:
        A, B = probe.witness
        result["probe"]["witness"] = {"A": A.tolist(), "B": B.tolist()}
    if args.family == "h2":
        t = pts
        direct = (t**args.a + 1) / (t**args.b + 1)
        result["dual_evaluation_max_rel_diff"] = float(
            np.max(np.abs(RatioFunction.value(func, t) / direct - 1))
        )
    return result, 0


def run_mc(args) -> tuple[dict, int]:
    if len(args.alpha) != len(args.beta):
        raise UsageError("--alpha and --beta need the same number of entries")
    try:
        mc = mc_build(args.alpha, args.beta, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    c_ratio = mc_eval(mc, args.lam, args.mu, "ratio")
    c_sinh = mc_eval(mc, args.lam, args.mu, "sinh")
    c_printed = mc_eval(mc, args.lam, args.mu, "ratio", gamma=mc.gamma_printed)
    spec = mc.spec
    suff = None
    if not validate_spec(spec, Mode.ANALYTIC):
        v = check_sufficient(spec)
        suff = {"verdict": v.status.value, "method": v.method,
                "lower_sum": v.certificate.lower_sum, "upper_sum": v.certificate.upper_sum}
    result = {
        "alpha": list(mc.alphas),
        "beta": list(mc.betas),
        "gamma_sym": mc.gamma_sym,
        "gamma_printed": mc.gamma_printed,
        "symmetry_residual": mc.symmetry_residual,
        "lambda": args.lam,
        "mu": args.mu,
        "c_ratio": c_ratio,
        "c_sinh": c_sinh,
        "route_ratio": c_ratio / c_sinh,
        "route_ratio_printed_gamma": c_printed / c_sinh,
        "sufficient": suff,
    }
    return result, 0


_RUNNERS = {"check": run_check, "sweep": run_sweep, "region": run_region, "verify": run_verify,
            "mc": run_mc}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out, code = _RUNNERS[args.command](args)
    except UsageError as exc:
        print(f"opmono: error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, NumericInconsistencyError) as exc:
        print(f"opmono: internal inconsistency: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"opmono: error: {exc}", file=sys.stderr)
        return 1
    text = out if isinstance(out, str) else dumps(out) + "\n"
    if args.command == "sweep" and args.out:
        sys.stdout.write(text)
    else:
        _emit(text, getattr(args, "out", None))
    return code


if __name__ == "__main__":
    sys.exit(main())
