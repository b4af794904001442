"""Finite-scale exponent estimates from best-approximation records.

The ordinary exponent is estimated by the largest ratio log(1/zeta)/log q over
the tail of the record sequence; the uniform exponent by the smallest ratio
log(1/zeta_{nu-1})/log q_nu.  All logarithms are outward rounded, so every
estimate is an enclosure of the finite-scale statistic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Optional, Sequence

from mpmath import libmp

from .exact import Ball
from .roots import solve_G, solve_H, solve_Hds

__all__ = [
    "ExponentReport",
    "Verdict",
    "log_bounds",
    "estimate_ordinary",
    "estimate_uniform",
    "exponent_report",
    "check_bounds",
    "CONSISTENT",
    "VIOLATED",
]

LOG_PREC = 64
DEFAULT_TAIL = Fraction(1, 2)
CONSISTENT = "consistent"
VIOLATED = "violated-at-finite-scale"


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x
    man, exp = (-1 if sign else 1) * int(man), int(exp)  # gmpy2 backend hands out mpz
    return Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)


def log_bounds(x: Fraction, prec: int = LOG_PREC) -> tuple:
    """Rational (lo, hi) with lo <= log(x) <= hi, for x > 0."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of a non-positive number")
    if x == 1:
        return Fraction(0), Fraction(0)
    lo = libmp.mpf_log(libmp.from_rational(x.numerator, x.denominator, prec + 8, "f"), prec, "f")
    hi = libmp.mpf_log(libmp.from_rational(x.numerator, x.denominator, prec + 8, "c"), prec, "c")
    lo, hi = _mpf_to_fraction(lo), _mpf_to_fraction(hi)
    # two extra ulps each side in case the library rounding is off by one
    slack = Fraction(1, 1 << (prec - 2)) * max(abs(lo), abs(hi), Fraction(1, 1 << 32))
    return lo - slack, hi + slack


def _log_inv_zeta(zeta: Ball) -> tuple:
    if zeta.lo <= 0:
        raise ArithmeticError("zeta enclosure touches 0")
    if zeta.hi >= 1:
        raise ArithmeticError("zeta enclosure touches 1")
    lo, _ = log_bounds(1 / zeta.hi)
    _, hi = log_bounds(1 / zeta.lo)
    return lo, hi


def _ratio(num: tuple, q: int) -> Ball:
    """Ball for num / log q with num = (lo, hi) >= 0 and q >= 2."""
    lq_lo, lq_hi = log_bounds(Fraction(q))
    return Ball.from_bounds(num[0] / lq_hi, num[1] / lq_lo)


def _tail_count(n: int, tail_fraction: Fraction) -> int:
    return max(1, ceil(n * Fraction(tail_fraction)))


def _check_tail(tail_fraction) -> Fraction:
    tf = Fraction(tail_fraction)
    if not 0 < tf <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    return tf


def _ordinary_rows(records) -> list:
    return [(r, _ratio(_log_inv_zeta(r.zeta), r.q)) for r in records if r.q >= 2]


def _uniform_rows(records) -> list:
    return [(cur, _ratio(_log_inv_zeta(prev.zeta), cur.q)) for prev, cur in zip(records, records[1:])]


def _tail(records: Sequence, tail_fraction) -> tuple:
    tf = _check_tail(tail_fraction)
    if len(records) < 2:
        raise ValueError("need at least 2 records")
    k = _tail_count(len(records), tf)
    return records[-k:], records[-k - 1:] if k < len(records) else records


def estimate_ordinary(records: Sequence, tail_fraction=DEFAULT_TAIL) -> Ball:
    """max of log(1/zeta_nu)/log q_nu over the last tail_fraction of the records."""
    tail, _ = _tail(records, tail_fraction)
    rows = [b for _, b in _ordinary_rows(tail)]
    return Ball.from_bounds(max(b.lo for b in rows), max(b.hi for b in rows))


def estimate_uniform(records: Sequence, tail_fraction=DEFAULT_TAIL) -> Ball:
    """min of log(1/zeta_{nu-1})/log q_nu over nu in the last tail_fraction of the records."""
    _, window = _tail(records, tail_fraction)
    rows = [b for _, b in _uniform_rows(window)]
    return Ball.from_bounds(min(b.lo for b in rows), min(b.hi for b in rows))


@dataclass(frozen=True)
class ExponentReport:
    m: int
    qmax: int
    omega_est: Ball
    omega_hat_est: Ball
    per_nu: tuple = ()
    tail_fraction: Fraction = DEFAULT_TAIL


def exponent_report(records: Sequence, m: int, qmax: int, tail_fraction=DEFAULT_TAIL) -> ExponentReport:
    """Both estimates plus the per-record table (nu, q, zeta, ordinary ratio, uniform ratio)."""
    omega = estimate_ordinary(records, tail_fraction)
    omega_hat = estimate_uniform(records, tail_fraction)
    ordinary = {r.index: b for r, b in _ordinary_rows(records)}
    uniform = {r.index: b for r, b in _uniform_rows(records)}
    table = tuple((r.index, r.q, r.zeta, ordinary.get(r.index), uniform.get(r.index)) for r in records)
    return ExponentReport(m, qmax, omega, omega_hat, table, Fraction(tail_fraction))


@dataclass(frozen=True)
class Verdict:
    bound: str
    reference: str
    margin: Fraction
    status: str
    value: Optional[Ball] = field(default=None, compare=False)


def _upper(name, ref, est: Ball, bound: Ball, tol) -> Verdict:
    # est <= bound, up to enclosure radii and tolerance
    margin = bound.center - est.center
    ok = margin + bound.radius + est.radius + tol >= 0
    return Verdict(name, ref, margin, CONSISTENT if ok else VIOLATED, bound)


def _lower(name, ref, est: Ball, bound: Ball, tol) -> Verdict:
    margin = est.center - bound.center
    ok = margin + bound.radius + est.radius + tol >= 0
    return Verdict(name, ref, margin, CONSISTENT if ok else VIOLATED, bound)


def check_bounds(report: ExponentReport, context: dict, tolerance=Fraction(1, 20)) -> list:
    """Advisory verdicts against the exponent bounds that apply to ``context``.

    context keys: ``m`` (required), ``lift`` in {None, "square", "poly",
    "variety"}, and ``d``, ``s`` for the lifted and variety bounds.
    """
    tol = Fraction(tolerance)
    if "m" not in context:
        raise ValueError("context needs 'm'")
    m = context["m"]
    w, wh = report.omega_est, report.omega_hat_est
    out = [
        _upper("omega_hat <= 1", "Jarnik upper bound", wh, Ball(Fraction(1)), tol),
        _lower("omega_hat >= 1/m", "Minkowski lower bound", wh, Ball(Fraction(1, m)), tol),
        _lower("omega >= omega_hat", "ordering of exponents (data quality)", w, wh, tol),
    ]
    if m >= 2 and 0 < wh.center < 1 and wh.center > 0:
        g = solve_G(m, wh.center).value
        ratio = Ball.from_bounds(w.lo / wh.hi, w.hi / wh.lo) if wh.lo > 0 else Ball(w.center / wh.center)
        out.append(_lower(f"omega/omega_hat >= G_{m}", "ratio bound for totally irrational targets", ratio, g, tol))
    lift = context.get("lift")
    if lift is not None:
        for key in ("d", "s"):
            if key not in context:
                raise ValueError(f"context for lift '{lift}' needs '{key}'")
        d, s = context["d"], context["s"]
        if lift == "square":
            h = solve_H(d).value
            out.append(_upper(f"omega_hat <= H_{d}", "squared-norm lift bound", wh, h, tol))
        elif lift == "poly":
            h = solve_Hds(d, s).value
            out.append(_upper(f"omega_hat <= H_{{{d},{s}}}", "form lift bound", wh, h, tol))
        elif lift == "variety":
            if d >= 2:
                h = solve_Hds(d - 1, s).value
                out.append(_upper(f"omega_hat <= H_{{{d - 1},{s}}}", "point-on-variety uniform bound", wh, h, tol))
            out.append(_upper(f"omega <= {s - 1}", "point-on-variety ordinary bound (finitely many rational points)", w, Ball(Fraction(s - 1)), tol))
        else:
            raise ValueError(f"unknown lift kind {lift!r}")
    return out
