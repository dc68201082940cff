"""Command-line driver: ``levelset {moments,recover,roundtrip,verify-lemma,report}``.

Exit codes: 0 success, 1 tolerance or sampling failure, 2 noncompact level set,
3 unreadable or malformed input, 4 singular system, 5 missing moments.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from .errors import (DegenerateSampling, MissingMoment, NotCompact, ParseError, SingularMatrix,
                     UnderdeterminedFamily)
from .momentgen import (BUILTINS, MomentVector, QuadratureConfig, lemma1_check, min_on_sphere,
                        moments_mc, moments_radial_upto)
from .polycore import HomogeneousPolynomial, as_multi_index, enumerate_upto
from .recovery import (IndexFamily, build_moment_matrix, condition_report, recover_family,
                       recover_theorem, roundtrip)

EXIT_OK, EXIT_FAIL, EXIT_NONCOMPACT, EXIT_PARSE, EXIT_SINGULAR, EXIT_MISSING = 0, 1, 2, 3, 4, 5
DEFAULT_SEED = 42


def _default_seed() -> int:
    raw = os.environ.get("LEVELSET_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"LEVELSET_SEED must be an integer, got {raw!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _warn(notes):
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)


def parse_orders(text: str, d: int) -> list[int]:
    """Resolve tokens like ``d,2d,3`` against the polynomial degree."""
    orders = []
    for token in text.split(","):
        token = token.strip()
        m = re.fullmatch(r"(\d*)d", token)
        if m:
            orders.append(int(m.group(1) or 1) * d)
        elif token.isdigit():
            orders.append(int(token))
        else:
            raise ParseError(f"bad order token {token!r}")
    return sorted(set(orders))


def parse_alphas(text: str, n: int) -> list[tuple[int, ...]]:
    """``"0,0;2,0"`` -> ``[(0, 0), (2, 0)]``."""
    try:
        return [as_multi_index([int(v) for v in part.split(",")], n)
                for part in text.split(";") if part.strip()]
    except ValueError:
        raise ParseError(f"bad alpha list {text!r}") from None


def _config(args) -> QuadratureConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    return QuadratureConfig(sphere_points=args.sphere_points, mc_samples=args.samples, seed=seed)


def _load_poly(path) -> HomogeneousPolynomial:
    return HomogeneousPolynomial.from_json(_read(path))


def _load_moments(path) -> MomentVector:
    text = _read(path)
    if path.endswith(".csv"):
        return MomentVector.from_csv(text)
    return MomentVector.from_json(text)


def _report_text(report, fmt, extra=None) -> str:
    if fmt == "csv":
        d = report.to_dict()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"a{i + 1}" for i in range(d["n"])] + ["coefficient"])
        for a, c in zip(d["alphas"], d["coefficients"]):
            w.writerow(a + [repr(c)])
        return buf.getvalue()
    data = report.to_dict()
    if extra:
        data.update(extra)
    return json.dumps(data) + "\n"


# -- subcommands ---------------------------------------------------------------

def cmd_moments(args) -> int:
    poly = _load_poly(args.poly)
    cfg = _config(args)
    orders = parse_orders(args.orders, poly.d)
    cert = min_on_sphere(poly, cfg)
    _warn(cert.warnings)
    engine = moments_mc if args.engine == "mc" else moments_radial_upto
    mv = engine(poly, orders, cfg, certificate=cert)
    _emit(mv.to_csv() if args.format == "csv" else mv.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_recover(args) -> int:
    mv = _load_moments(args.moments)
    n = args.n if args.n is not None else mv.n
    if n != mv.n:
        raise ParseError(f"--n {n} does not match moment file dimension {mv.n}")
    if args.family:
        fam = IndexFamily.from_json(_read(args.family))
        if (fam.n, fam.d) != (n, args.d):
            raise ParseError("family n/d do not match --n/--d")
        report = recover_family(mv, fam, force=args.force)
    else:
        report = recover_theorem(mv, n, args.d, force=args.force)
    _warn(report.warnings)
    _emit(_report_text(report, args.format), args.out)
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    poly = _load_poly(args.poly)
    report, err = roundtrip(poly, _config(args), engine=args.engine, force=args.force)
    _warn(report.warnings)
    _emit(_report_text(report, args.format, {"coeff_error": err}), args.out)
    tol = 1e-6 if args.tol is None else args.tol
    ok = err <= tol
    print(f"coeff_error={err:.3e} tol={tol:g} {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_lemma(args) -> int:
    if args.builtin:
        if args.n is None:
            raise ParseError("--builtin needs --n")
        f = BUILTINS[args.builtin](args.n)
    elif args.poly:
        f = _load_poly(args.poly)
    else:
        raise ParseError("give --poly or --builtin")
    cfg = _config(args)
    ks = [int(k) for k in args.k.split(",")]
    if args.alpha:
        alphas = parse_alphas(args.alpha, f.n)
    else:
        alphas = enumerate_upto(f.n, int(math.ceil(f.d)))
    cert = min_on_sphere(f, cfg)
    rows = []
    for k in ks:
        for a in alphas:
            res = lemma1_check(f, k, a, cfg, engine=args.engine, certificate=cert)
            rows.append((k, a, res.lhs, res.rhs, res.relerr))
    if args.format == "json":
        text = json.dumps([{"k": k, "alpha": list(a), "lhs": l, "rhs": r, "relerr": e}
                           for k, a, l, r, e in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "alpha", "lhs", "rhs", "relerr"])
        for k, a, l, r, e in rows:
            w.writerow([k, " ".join(map(str, a)), repr(l), repr(r), repr(e)])
        text = buf.getvalue()
    _emit(text, args.out)
    tol = 1e-8 if args.tol is None else args.tol
    worst = max(e for *_, e in rows) if rows else 0.0
    print(f"max relerr={worst:.3e} tol={tol:g}", file=sys.stderr)
    return EXIT_OK if worst <= tol else EXIT_FAIL


def cmd_report(args) -> int:
    """Moment-matrix diagnostics: symmetry, smallest eigenvalue, condition number."""
    mv = _load_moments(args.moments)
    M = build_moment_matrix(mv, mv.n, args.d)
    eig = np.linalg.eigvalsh(M.entries)
    kappa = condition_report(M)
    data = {
        "n": mv.n, "d": args.d, "size": M.size,
        "symmetric": bool(np.array_equal(M.entries, M.entries.T)),
        "min_eigenvalue": float(eig[0]), "max_eigenvalue": float(eig[-1]),
        "norm": float(np.linalg.norm(M.entries, 2)),
        "condition": kappa if np.isfinite(kappa) else None,
    }
    _emit(json.dumps(data, indent=1) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--engine", choices=["radial", "mc"], default="radial")
    common.add_argument("--sphere-points", type=int, default=None,
                        help="node budget on the unit sphere (default depends on n)")
    common.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo samples")
    common.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default $LEVELSET_SEED or {DEFAULT_SEED})")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=["json", "csv"], default=None)
    common.add_argument("--force", action="store_true",
                        help="downgrade ill-conditioning errors to warnings")

    parser = argparse.ArgumentParser(prog="levelset", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[common], help="moments of {g <= 1}")
    p.add_argument("--poly", required=True)
    p.add_argument("--orders", default="d,2d")
    p.set_defaults(func=cmd_moments, fmt_default="json")

    p = sub.add_parser("recover", parents=[common], help="recover g from moments")
    p.add_argument("--moments", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--family", default=None)
    p.set_defaults(func=cmd_recover, fmt_default="json")

    p = sub.add_parser("roundtrip", parents=[common], help="moments then recovery")
    p.add_argument("--poly", required=True)
    p.set_defaults(func=cmd_roundtrip, fmt_default="json")

    p = sub.add_parser("verify-lemma", parents=[common], help="check the moment identity")
    p.add_argument("--poly", default=None)
    p.add_argument("--builtin", choices=sorted(BUILTINS), default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", default="0,1,2,3")
    p.add_argument("--alpha", default=None, help='e.g. "0,0;2,0" (default: all |alpha| <= d)')
    p.set_defaults(func=cmd_verify_lemma, fmt_default="csv")

    p = sub.add_parser("report", parents=[common], help="moment-matrix diagnostics")
    p.add_argument("--moments", required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_report, fmt_default="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.fmt_default
    try:
        return args.func(args)
    except NotCompact as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCOMPACT
    except MissingMoment as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except SingularMatrix as exc:
        print(f"error: {exc} (use --force to continue)", file=sys.stderr)
        return EXIT_SINGULAR
    except (ParseError, UnderdeterminedFamily, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DegenerateSampling as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
