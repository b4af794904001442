"""Command-line front end.

Exit codes: 0 success, 1 verification failures, 2 usage or input errors,
3 precision exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from . import best_approx as ba
from . import exponents as ex
from . import roots as rt
from . import variety as va
from . import verify as vf
from .exact import Ball, PrecisionExhausted, fraction_to_decimal, parse_expr_list
from .polynomial import Poly, load_poly

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization


def _ball_json(b: Ball, digits: int = 20) -> list:
    return [fraction_to_decimal(b.lo, digits), fraction_to_decimal(b.hi, digits, up=True)]


def _frac_json(x: Optional[Fraction]):
    return None if x is None else str(x)


def _jsonable(x):
    if isinstance(x, Ball):
        return _ball_json(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def report_to_json(report: vf.VerificationReport) -> dict:
    return {
        "checked": report.checked,
        "passed": report.passed,
        "skipped": report.skipped,
        "failures": _jsonable(report.failures),
        "extremal_margin": _frac_json(report.extremal_margin),
        "extra": _jsonable(report.extra),
    }


def report_from_json(data: dict) -> vf.VerificationReport:
    m = data.get("extremal_margin")
    return vf.VerificationReport(
        checked=data["checked"], passed=data["passed"], skipped=data["skipped"],
        failures=list(data["failures"]), extremal_margin=None if m is None else Fraction(m),
        extra=dict(data.get("extra", {})),
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out: Optional[str]) -> None:
    _emit(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", out)


# ---------------------------------------------------------------------------
# argument helpers


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _target_exprs(args) -> list:
    if not args.target:
        raise UsageError("--target is required")
    return parse_expr_list(args.target)


def _lifted_target(args):
    """(Target, lift kind, form) from --target/--lift."""
    xi = _target_exprs(args)
    asserted = args.assert_irrational
    lift = getattr(args, "lift", None)
    if lift is None:
        return ba.Target(tuple(xi), asserted), None, None
    if lift == "square":
        from .polynomial import sphere

        return ba.lift_square(xi, asserted), "square", sphere(len(xi))
    if lift.startswith("poly:"):
        f = load_poly(lift[5:])
        return ba.lift_poly(f, xi, asserted), "poly", f
    raise UsageError(f"--lift must be 'square' or 'poly:FILE', got {lift!r}")


def _add_target(p, required=True):
    p.add_argument("--target", required=required, help="comma-separated expressions")


def _add_irr(p):
    p.add_argument("--assert-irrational", dest="assert_irrational", action="store_true", default=True,
                   help="assert the target is totally irrational (default)")
    p.add_argument("--no-assert-irrational", dest="assert_irrational", action="store_false")


def _add_k(p):
    p.add_argument("--k-exact", type=_fraction, default=None, help="exact sup of |f| on the unit sphere")


# ---------------------------------------------------------------------------
# commands


def cmd_roots(args) -> int:
    fam = args.family
    if fam == "H":
        res = rt.solve_H(args.d, args.prec)
        params = {"d": args.d}
    elif fam == "Hds":
        res = rt.solve_Hds(args.d, args.s, args.prec)
        params = {"d": args.d, "s": args.s}
    else:
        if args.omega_hat is None:
            raise UsageError("--omega-hat is required for --family G")
        res = rt.solve_G(args.m, args.omega_hat, args.prec)
        params = {"m": args.m, "omega_hat": str(args.omega_hat)}
    digits = max(20, args.prec * 3 // 10 + 2)
    _emit_json({
        "family": fam,
        "params": params,
        "enclosure": [fraction_to_decimal(res.lo, digits), fraction_to_decimal(res.hi, digits, up=True)],
        "enclosure_exact": [str(res.lo), str(res.hi)],
        "residual_bound": str(res.residual_bound),
        "equation": res.equation,
    }, args.out)
    return EXIT_OK


def cmd_best_approx(args) -> int:
    target, _, _ = _lifted_target(args)
    records = ba.scan(target, args.qmax, threads=args.threads, p=args.prec)
    _emit(ba.records_to_csv(records, target.m), args.out)
    return EXIT_OK


def cmd_exponents(args) -> int:
    target, kind, f = _lifted_target(args)
    records = ba.scan(target, args.qmax, threads=args.threads)
    report = ex.exponent_report(records, target.m, args.qmax, args.tail_fraction)
    ctx = {"m": target.m}
    if kind is not None:
        ctx.update(lift=kind, d=f.dim, s=f.require_homogeneous())
    elif args.on_variety:
        g = load_poly(args.on_variety)
        ctx.update(lift="variety", d=g.dim, s=g.require_homogeneous())
    verdicts = ex.check_bounds(report, ctx, args.tolerance)
    _emit_json({
        "target": str(target),
        "m": report.m,
        "qmax": report.qmax,
        "records": len(records),
        "tail_fraction": str(report.tail_fraction),
        "omega_est": _ball_json(report.omega_est),
        "omega_hat_est": _ball_json(report.omega_hat_est),
        "verdicts": [
            {"bound": v.bound, "reference": v.reference, "margin": fraction_to_decimal(v.margin, 20),
             "status": v.status}
            for v in verdicts
        ],
    }, args.out)
    return EXIT_OK


def cmd_sphere_points(args) -> int:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q"] + [f"a_{i + 1}" for i in range(args.dim)])
    for p in va.sphere_points(args.dim, args.tmax):
        w.writerow([p.q, *p.a])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_psi(args) -> int:
    f = load_poly(args.poly)
    xi = _target_exprs(args)
    bps = va.psi_breakpoints(f, xi, args.tmax, args.prec)
    _emit(va.breakpoints_to_csv(bps, f.dim, f.require_homogeneous(), args.tmax), args.out)
    return EXIT_OK


def _finish(report: vf.VerificationReport, out, **head) -> int:
    data = dict(head)
    data.update(report_to_json(report))
    _emit_json(data, out)
    return EXIT_FAIL if report.failures else EXIT_OK


def cmd_verify(args) -> int:
    f = load_poly(args.poly)
    what = args.what
    if what == "simplex":
        if args.tmax is None:
            raise UsageError("--tmax is required")
        rep = vf.exhaustive_simplex(f, args.tmax, args.k_exact, box=args.box)
        return _finish(rep, args.out, check="simplex", poly=str(f), tmax=args.tmax)
    if what == "breakpoints":
        if args.tmax is None:
            raise UsageError("--tmax is required")
        bps = va.psi_breakpoints(f, _target_exprs(args), args.tmax, args.prec)
        rep = vf.check_breakpoints(f, bps, args.k_exact, tmax=args.tmax)
        return _finish(rep, args.out, check="breakpoints", poly=str(f), target=args.target, tmax=args.tmax,
                       breakpoints=len(bps))
    if args.qmax is None:
        raise UsageError("--qmax is required")
    xi = _target_exprs(args)
    if what == "lemma2":
        target = ba.lift_poly(f, xi, args.assert_irrational)
        records = ba.scan(target, args.qmax, threads=args.threads)
        rep = vf.check_lemma2(f, records)
        return _finish(rep, args.out, check="lemma2", poly=str(f), target=args.target, qmax=args.qmax,
                       records=len(records))
    # case2
    lifted = args.lift is not None
    target = ba.lift_poly(f, xi, args.assert_irrational) if lifted else ba.Target(tuple(xi), args.assert_irrational)
    records = ba.scan(target, args.qmax, threads=args.threads)
    rep, rows = vf.case2_diagnostic(f, records, lifted)
    return _finish(rep, args.out, check="case2", poly=str(f), target=args.target, qmax=args.qmax,
                   records=len(records),
                   table=[{"nu": r["nu"], "q": r["q"], "abs_diff": str(r["abs_diff"]), "floor": str(r["floor"]),
                           "q_pow_s_minus_1_zeta": _ball_json(r["q_pow_s_minus_1_zeta"])} for r in rows])


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diophapprox", description="Certified experiments in Diophantine approximation.")
    parser.add_argument("--threads", type=_positive, default=1, help="worker threads for chunked scans")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--threads", type=_positive, default=argparse.SUPPRESS)

    p = sub.add_parser("roots", help="certified roots of the exponent-bound equations")
    p.add_argument("--family", choices=["H", "Hds", "G"], required=True)
    p.add_argument("--d", type=_positive, default=1)
    p.add_argument("--s", type=_positive, default=2)
    p.add_argument("--m", type=_positive, default=2)
    p.add_argument("--omega-hat", type=_fraction)
    p.add_argument("--prec", type=_positive, default=64)
    common(p)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("best-approx", help="best simultaneous approximation vectors as CSV")
    _add_target(p)
    p.add_argument("--qmax", type=_positive, required=True)
    p.add_argument("--lift", help="square | poly:FILE")
    p.add_argument("--prec", type=_positive, default=64)
    _add_irr(p)
    common(p)
    p.set_defaults(func=cmd_best_approx)

    p = sub.add_parser("exponents", help="finite-scale exponent estimates and bound verdicts (JSON)")
    _add_target(p)
    p.add_argument("--qmax", type=_positive, required=True)
    p.add_argument("--lift", help="square | poly:FILE")
    p.add_argument("--on-variety", help="polynomial f with f(target) = 1, for the point-on-variety bounds")
    p.add_argument("--tolerance", type=_fraction, default=Fraction(1, 20))
    p.add_argument("--tail-fraction", type=_fraction, default=Fraction(1, 2))
    _add_irr(p)
    common(p)
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("sphere-points", help="integer points of a_1^2 + ... + a_d^2 = q^2 as CSV")
    p.add_argument("--dim", type=_positive, required=True)
    p.add_argument("--tmax", type=_positive, required=True)
    common(p)
    p.set_defaults(func=cmd_sphere_points)

    p = sub.add_parser("psi", help="breakpoints of Psi_{f,xi} as CSV")
    p.add_argument("--poly", required=True, help="sphere:d, a file, or inline text")
    _add_target(p)
    p.add_argument("--tmax", type=_positive, required=True)
    p.add_argument("--prec", type=_positive, default=64)
    common(p)
    p.set_defaults(func=cmd_psi)

    p = sub.add_parser("verify", help="exact checks (JSON report)")
    p.add_argument("what", choices=["simplex", "breakpoints", "lemma2", "case2"])
    p.add_argument("--poly", required=True)
    _add_target(p, required=False)
    p.add_argument("--tmax", type=_positive)
    p.add_argument("--qmax", type=_positive)
    p.add_argument("--prec", type=_positive, default=64)
    p.add_argument("--box", type=_positive, help="|a_i| <= box*q for simplex corpora of non-sphere forms")
    p.add_argument("--lift", choices=["poly"], help="case2: scan the lifted target (x, f(x))")
    _add_k(p)
    _add_irr(p)
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PrecisionExhausted as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except (UsageError, ValueError, ZeroDivisionError, FileNotFoundError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
