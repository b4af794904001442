"""Exact machine checks of the inequalities and divisibilities used in the
proofs, run over enumerated data.

All comparisons are done on integers.  For two rational points a/q and b/r
put N = a*r - b*q, so that |a/q - b/r| = |N| / (q r).  The simplex bounds
become

    (i)   D * K * |N|^s >= q
    (ii)  D * K * |N|^s >= q * r

with |N|^s replaced by |N|^(2s) (and the right side squared) for odd s.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

import numpy as np

from .exact import P_MAX, Ball, PrecisionExhausted, ball_eval
from .polynomial import Poly, constants, eval_rational
from .variety import PsiBreakpoint, RationalPoint, primitive_points, psi_value

__all__ = [
    "Outcome",
    "VerificationReport",
    "PreconditionError",
    "check_simplex_i",
    "check_simplex_ii",
    "simplex_ratio",
    "exhaustive_simplex",
    "check_lemma2",
    "check_breakpoints",
    "case2_diagnostic",
]


class Outcome(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class PreconditionError(ValueError):
    pass


@dataclass
class VerificationReport:
    checked: int = 0
    passed: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)
    extremal_margin: Optional[Fraction] = None
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, outcome: Outcome, margin: Optional[Fraction] = None, witness: Optional[dict] = None):
        self.checked += 1
        if outcome is Outcome.SKIPPED:
            self.skipped += 1
            return
        if outcome is Outcome.PASS:
            self.passed += 1
        else:
            self.failures.append(witness or {})
        if margin is not None and (self.extremal_margin is None or margin < self.extremal_margin):
            self.extremal_margin = margin


# ---------------------------------------------------------------------------
# helpers


def _int_form(f: Poly):
    D = f.denominator
    return D, [(int(c * D), e) for e, c in f.terms.items()]


def _eval(terms, x) -> int:
    total = 0
    for c, exps in terms:
        t = c
        for xi, e in zip(x, exps):
            if e:
                t *= xi ** e
        total += t
    return total


def _require_level(f: Poly, pt: RationalPoint, s: int, name: str) -> None:
    """f(a/q) = A/q for an integer A, i.e. q^(s-1) divides f(a)."""
    D, terms = _int_form(f)
    val = _eval(terms, pt.a)  # D * f(a)
    if val % (D * pt.q ** (s - 1)):
        raise PreconditionError(
            f"{name}: f({pt.a}/{pt.q}) = {Fraction(val, D * pt.q ** s)} is not of the form A/{pt.q}"
        )


def _k_bar(f: Poly, k_exact) -> Fraction:
    return constants(f, k_exact).K_bar


def simplex_ratio(f: Poly, alpha: RationalPoint, beta: RationalPoint, part: str = "ii", k_exact=None):
    """(outcome, LHS/RHS) for the integer form of the simplex bound; odd s compares squares."""
    s = f.require_homogeneous()
    D, terms = _int_form(f)
    K = _k_bar(f, k_exact)
    q, r = alpha.q, beta.q
    N = [x * r - y * q for x, y in zip(alpha.a, beta.a)]
    if _eval(terms, N) == 0:
        return Outcome.SKIPPED, None
    n2 = sum(x * x for x in N)
    rhs = q * r if part == "ii" else q
    if s % 2 == 0:
        lhs = D * K * n2 ** (s // 2)
    else:
        lhs = (D * K) ** 2 * n2 ** s
        rhs = rhs * rhs
    ratio = Fraction(lhs) / rhs
    return (Outcome.PASS if ratio >= 1 else Outcome.FAIL), ratio


def check_simplex_i(f: Poly, alpha: RationalPoint, beta: RationalPoint, k_exact=None) -> Outcome:
    """|alpha - beta|^s >= 1 / (D K q^(s-1) r^s) when f(alpha) = A/q."""
    s = f.require_homogeneous()
    _require_level(f, alpha, s, "alpha")
    return simplex_ratio(f, alpha, beta, "i", k_exact)[0]


def check_simplex_ii(f: Poly, alpha: RationalPoint, beta: RationalPoint, k_exact=None) -> Outcome:
    """|alpha - beta|^s >= 1 / (D K q^(s-1) r^(s-1)) when f(alpha) = A/q, f(beta) = B/r."""
    s = f.require_homogeneous()
    _require_level(f, alpha, s, "alpha")
    _require_level(f, beta, s, "beta")
    return simplex_ratio(f, alpha, beta, "ii", k_exact)[0]


# ---------------------------------------------------------------------------
# exhaustive simplex bound


_I64_SAFE = 1 << 62


def exhaustive_simplex(f: Poly, tmax: int, k_exact=None, corpus: Optional[Sequence[RationalPoint]] = None,
                       box: Optional[int] = None) -> VerificationReport:
    """Part (ii) on every unordered pair of primitive points of {f = 1} with q <= tmax.

    On this corpus every point satisfies the hypothesis of both parts, and
    part (ii) implies part (i) since r >= 1.
    """
    s = f.require_homogeneous()
    pts = list(corpus) if corpus is not None else primitive_points(f, tmax, box)
    if not pts:
        raise ValueError("empty corpus")
    for p in pts:
        _require_level(f, p, s, "point")
    D, terms = _int_form(f)
    K = _k_bar(f, k_exact)
    report = VerificationReport()
    report.extra = {"corpus_size": len(pts), "part": "ii", "part_i_implied": True}
    if len(pts) < 2:
        return report

    Q = np.array([p.q for p in pts], dtype=np.int64)
    A = np.array([p.a for p in pts], dtype=np.int64)
    qmax = int(Q.max())
    amax = int(np.abs(A).max())
    nmax = 2 * amax * qmax
    dk_num, dk_den = (D * K).numerator, (D * K).denominator
    even = s % 2 == 0
    pow_n2 = s // 2 if even else s
    coef_max = max(abs(c) for c, _ in terms)
    fits = (
        dk_num ** (1 if even else 2) * (f.dim * nmax * nmax) ** pow_n2 < _I64_SAFE
        and dk_den ** (1 if even else 2) * qmax ** 4 < _I64_SAFE
        and coef_max * len(terms) * nmax ** s < _I64_SAFE
    )
    if not fits:
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                out, ratio = simplex_ratio(f, pts[i], pts[j], "ii", k_exact)
                report.add(out, ratio, _witness(pts[i], pts[j], ratio) if out is Outcome.FAIL else None)
        return report

    fmin = np.inf  # float shadow of the exact minimum, used only to pick candidates
    for i in range(len(pts) - 1):
        q, a = Q[i], A[i]
        r, b = Q[i + 1:], A[i + 1:]
        N = a[None, :] * r[:, None] - b * q
        fN = np.zeros(len(r), dtype=np.int64)
        for c, exps in terms:
            t = np.full(len(r), c, dtype=np.int64)
            for k, e in enumerate(exps):
                if e:
                    t = t * N[:, k] ** e
            fN += t
        live = fN != 0
        n2 = (N * N).sum(axis=1)
        rhs = q * r
        if even:
            lhs = dk_num * n2 ** pow_n2
            rhs = rhs * dk_den
        else:
            lhs = dk_num * dk_num * n2 ** pow_n2
            rhs = rhs * rhs * dk_den * dk_den
        ok = lhs >= rhs
        n_live = int(live.sum())
        report.checked += len(r)
        report.skipped += len(r) - n_live
        report.passed += int((ok & live).sum())
        for j in np.nonzero(live & ~ok)[0]:
            jj = i + 1 + int(j)
            _, ratio = simplex_ratio(f, pts[i], pts[jj], "ii", k_exact)
            report.failures.append(_witness(pts[i], pts[jj], ratio))
        if not n_live:
            continue
        fr = np.where(live, lhs / rhs.astype(np.float64), np.inf)
        row_min = float(fr.min())
        if row_min > fmin * (1 + 1e-9):
            continue
        for jn in np.nonzero(fr <= row_min * (1 + 1e-9))[0]:
            _, ratio = simplex_ratio(f, pts[i], pts[i + 1 + int(jn)], "ii", k_exact)
            if report.extremal_margin is None or ratio < report.extremal_margin:
                report.extremal_margin = ratio
        fmin = min(fmin, row_min)
    return report


def _witness(alpha: RationalPoint, beta: RationalPoint, ratio) -> dict:
    return {"alpha": [alpha.q, list(alpha.a)], "beta": [beta.q, list(beta.a)], "ratio": ratio}


# ---------------------------------------------------------------------------
# divisibility of record gcds


def check_lemma2(f: Poly, records: Sequence) -> VerificationReport:
    """Case split of consecutive records of a lifted target (x, f(x)), and the
    divisibility Delta^s | D q^(s-1) on every record whose first d coordinates
    satisfy f(alpha) = A/q (A the last coordinate)."""
    s = f.require_homogeneous()
    d = f.dim
    D, terms = _int_form(f)
    for rec in records:
        if len(rec.a) != d + 1:
            raise ValueError(f"record at q={rec.q} has {len(rec.a)} coordinates, expected {d + 1}")
        if gcd(rec.q, *rec.a) != 1:
            raise ValueError(f"record at q={rec.q} is not primitive")
    report = VerificationReport()
    cases = {"case_1_1": 0, "case_1_2": 0, "case_2": 0, "first_record_on_level": 0, "first_record_off_level": 0}
    max_delta = 1
    for idx, rec in enumerate(records):
        q, a, A = rec.q, rec.a[:d], rec.a[d]
        on_level = _eval(terms, a) == D * A * q ** (s - 1)
        if idx == 0:
            cases["first_record_on_level" if on_level else "first_record_off_level"] += 1
        else:
            prev = records[idx - 1]
            same_point = all(x * prev.q == y * q for x, y in zip(a, prev.a[:d]))
            key = "case_2" if not on_level else ("case_1_1" if same_point else "case_1_2")
            cases[key] += 1
        if not on_level:
            report.add(Outcome.SKIPPED)
            continue
        delta = gcd(q, *a)
        max_delta = max(max_delta, delta)
        target = D * q ** (s - 1)
        if target % delta ** s == 0:
            report.add(Outcome.PASS, Fraction(delta ** s, 1))
        else:
            report.add(Outcome.FAIL, None, {"nu": rec.index, "q": q, "a": list(rec.a), "delta": delta,
                                             "D_q_pow": target})
    report.extremal_margin = None
    report.extra = dict(cases, max_delta=max_delta)
    return report


# ---------------------------------------------------------------------------
# breakpoint chain


def _psi_at(bp: PsiBreakpoint, s: int, p: int) -> Ball:
    if bp.xi is None:
        raise PrecisionExhausted(f"cannot refine psi at q={bp.q}: target not attached")
    return ball_eval(psi_value(bp.xi, bp.point, s), p)


def check_breakpoints(f: Poly, breakpoints: Sequence[PsiBreakpoint], k_exact=None,
                      tmax: Optional[int] = None) -> VerificationReport:
    """q_nu^(s-1) * Psi(q_{nu-1}) >= 1 / (2^s D K) for consecutive breakpoints."""
    s = f.require_homogeneous()
    D, terms = _int_form(f)
    K = _k_bar(f, k_exact)
    bound = Fraction(1) / (2 ** s * D * K)
    report = VerificationReport()
    for prev, cur in zip(breakpoints, breakpoints[1:]):
        N = [x * prev.point.q - y * cur.point.q for x, y in zip(cur.point.a, prev.point.a)]
        if _eval(terms, N) == 0:
            report.add(Outcome.SKIPPED)
            continue
        psi, p = prev.psi, 64
        scale = cur.q ** (s - 1)
        while True:
            if psi.lo * scale >= bound:
                report.add(Outcome.PASS, psi.lo * scale / bound)
                break
            if psi.hi * scale < bound:
                report.add(Outcome.FAIL, psi.hi * scale / bound,
                           {"q_prev": prev.q, "q": cur.q, "psi_hi": psi.hi, "bound": bound})
                break
            p *= 2
            if p > P_MAX:
                raise PrecisionExhausted(f"undecided breakpoint comparison at q={cur.q}")
            psi = _psi_at(prev, s, p)
    report.extra = {"bound": bound}
    if breakpoints and tmax is not None:
        best = None
        for i, b in enumerate(breakpoints):
            T = breakpoints[i + 1].q - 1 if i + 1 < len(breakpoints) else tmax
            v = T ** (s - 1) * b.psi.lo
            if best is None or v > best[0]:
                best = (v, T)
        report.extra["max_T_pow_s_minus_1_psi_lo"] = best[0]
        report.extra["argmax_T"] = best[1]
    return report


# ---------------------------------------------------------------------------
# Case 2 witness


def case2_diagnostic(f: Poly, records: Sequence, lifted: Optional[bool] = None) -> tuple:
    """Exact witnesses |f(alpha) - c| >= 1 / (D q^s) and the table of q^(s-1) zeta.

    ``c`` is 1 for records of a point on {f = 1} (length d) and A/q for
    records of the lifted target (length d + 1).  Records with f(alpha) = c
    are left out of the table.  Returns (report, rows).
    """
    s = f.require_homogeneous()
    d = f.dim
    D = f.denominator
    report = VerificationReport()
    rows = []
    for rec in records:
        is_lift = lifted if lifted is not None else len(rec.a) == d + 1
        if len(rec.a) != (d + 1 if is_lift else d):
            raise ValueError(f"record at q={rec.q} has the wrong length")
        alpha = [Fraction(x, rec.q) for x in rec.a[:d]]
        c = Fraction(rec.a[d], rec.q) if is_lift else Fraction(1)
        diff = eval_rational(f, alpha) - c
        if diff == 0:
            report.add(Outcome.SKIPPED)
            continue
        floor_ = Fraction(1, D * rec.q ** s)
        if abs(diff) >= floor_:
            report.add(Outcome.PASS, abs(diff) / floor_)
        else:
            report.add(Outcome.FAIL, abs(diff) / floor_, {"nu": rec.index, "q": rec.q, "a": list(rec.a),
                                                          "diff": diff})
        scaled = Ball(rec.zeta.center * rec.q ** (s - 1), rec.zeta.radius * rec.q ** (s - 1))
        rows.append({"nu": rec.index, "q": rec.q, "abs_diff": abs(diff), "floor": floor_,
                     "q_pow_s_minus_1_zeta": scaled})
    if rows:
        report.extra["min_q_pow_s_minus_1_zeta_lo"] = min(r["q_pow_s_minus_1_zeta"].lo for r in rows)
    return report, rows
