"""Rational points on the unit sphere and on {f = 1}, and the function

    Psi(T) = min { |q xi - a|^s / q : 1 <= q <= T, f(a/q) = 1 }

together with its breakpoints (the q at which the running minimum drops).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, gcd, isqrt
from typing import Optional, Sequence

from .exact import (
    P_MAX,
    Ball,
    PrecisionExhausted,
    RealExpr,
    as_rational,
    ball_eval,
    const,
    enclose,
    exprs_equal,
    fraction_to_decimal,
    iroot,
    parse_expr,
    power,
    sqrt,
)
from .exponents import log_bounds
from .polynomial import Poly

__all__ = [
    "RationalPoint",
    "NearPoint",
    "PsiBreakpoint",
    "EmptyWindowError",
    "sphere_points",
    "primitive_points",
    "variety_points",
    "psi_breakpoints",
    "psi_value",
    "point_near",
    "stereo_project",
    "stereo_lift",
    "intrinsic_uniform_exponent",
    "breakpoints_to_csv",
    "breakpoints_from_csv",
]


class EmptyWindowError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class RationalPoint:
    q: int
    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if self.q < 1:
            raise ValueError("q must be positive")

    @property
    def alpha(self) -> tuple:
        return tuple(Fraction(x, self.q) for x in self.a)

    @property
    def is_primitive(self) -> bool:
        return gcd(self.q, *self.a) == 1

    def reduced(self) -> "RationalPoint":
        g = gcd(self.q, *self.a)
        return RationalPoint(self.q // g, tuple(x // g for x in self.a))


@dataclass(frozen=True)
class NearPoint(RationalPoint):
    # |xi - alpha| * sqrt(q * t)
    quality: Optional[Ball] = field(default=None, compare=False)


@dataclass(frozen=True)
class PsiBreakpoint:
    q: int
    point: RationalPoint
    psi: Ball
    xi: Optional[tuple] = field(default=None, compare=False)


# ---------------------------------------------------------------------------
# sphere enumeration


def _sphere_solutions(d: int, n: int) -> list:
    """All integer vectors of length d with squared norm n, lexicographic."""
    if d == 1:
        r = isqrt(n)
        if r * r != n:
            return []
        return [(-r,), (r,)] if r else [(0,)]
    out = []
    r = isqrt(n)
    for x in range(-r, r + 1):
        for rest in _sphere_solutions(d - 1, n - x * x):
            out.append((x,) + rest)
    return out


def sphere_points(d: int, tmax: int) -> list:
    """Every (q, a) with 1 <= q <= tmax and a_1^2 + ... + a_d^2 = q^2."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if tmax < 1:
        raise ValueError("tmax must be >= 1")
    return [RationalPoint(q, a) for q in range(1, tmax + 1) for a in _sphere_solutions(d, q * q)]


def primitive_points(f: Poly, tmax: int, box: Optional[int] = None) -> list:
    """Primitive (q, a) with q <= tmax and f(a/q) = 1.

    Spheres are enumerated directly; other forms need ``box``, a bound on
    |a_i| / q.
    """
    s = f.require_homogeneous()
    if _is_unit_sphere(f):
        return [p for p in sphere_points(f.dim, tmax) if p.is_primitive]
    if box is None:
        raise ValueError("a coordinate bound is needed for forms other than the unit sphere")
    terms = _int_terms(f)
    D = f.denominator
    out = []
    for q in range(1, tmax + 1):
        target = D * q ** s
        r = box * q
        for a in _box(tuple((-r, r) for _ in range(f.dim))):
            if _eval_terms(terms, a) == target and gcd(q, *a) == 1:
                out.append(RationalPoint(q, a))
    return out


def _is_unit_sphere(f: Poly) -> bool:
    return f.homogeneous_degree == 2 and f.terms == {
        tuple(2 if i == j else 0 for j in range(f.dim)): Fraction(1) for i in range(f.dim)
    }


def _int_terms(f: Poly) -> list:
    D = f.denominator
    return [(int(c * D), e) for e, c in f.terms.items()]


def _eval_terms(terms, a) -> int:
    total = 0
    for c, exps in terms:
        t = c
        for x, e in zip(a, exps):
            if e:
                t *= x ** e
        total += t
    return total


def _box(ranges):
    if not ranges:
        yield ()
        return
    lo, hi = ranges[0]
    for x in range(lo, hi + 1):
        for rest in _box(ranges[1:]):
            yield (x,) + rest


# ---------------------------------------------------------------------------
# Psi


class _Xi:
    """Integer enclosures of the target coordinates at several scales."""

    def __init__(self, xi: Sequence[RealExpr]):
        self.exprs = tuple(xi)
        self._cache: dict = {}

    def at(self, w: int) -> list:
        if w not in self._cache:
            self._cache[w] = [enclose(x, w) for x in self.exprs]
        return self._cache[w]


def _s_bounds(xi: _Xi, q: int, a: tuple, w: int) -> tuple:
    """[lo, hi] (scale 2**(2w)) for sum (q xi_i - a_i)^2."""
    slo = shi = 0
    for (lo, hi), ai in zip(xi.at(w), a):
        dlo, dhi = q * lo - (ai << w), q * hi - (ai << w)
        if dlo >= 0:
            m_lo, m_hi = dlo, dhi
        elif dhi <= 0:
            m_lo, m_hi = -dhi, -dlo
        else:
            m_lo, m_hi = 0, max(-dlo, dhi)
        slo += m_lo * m_lo
        shi += m_hi * m_hi
    return slo, shi


def _w_expr(xi: _Xi, q: int, a: tuple, s: int) -> RealExpr:
    """|q xi - a|^(2s) / q^2 as an expression; monotone in Psi."""
    total = None
    for x, ai in zip(xi.exprs, a):
        t = power(q * x - ai, 2)
        total = t if total is None else total + t
    return power(total, s) / (q * q)


def psi_value(xi: Sequence[RealExpr], point: RationalPoint, s: int) -> RealExpr:
    """|q xi - a|^s / q as an expression."""
    total = None
    for x, ai in zip(xi, point.a):
        t = power(point.q * x - ai, 2)
        total = t if total is None else total + t
    num = power(total, s // 2) if s % 2 == 0 else sqrt(power(total, s))
    return num / point.q


_TIE_CHECK_W = 512


def _compare(xi: _Xi, s: int, c1, c2) -> int:
    """Sign of W(c1) - W(c2) for candidates c = (q, a); 0 only for exact ties."""
    (q1, a1), (q2, a2) = c1, c2
    w = 128
    tie_checked = False
    while w <= 4 * P_MAX:
        l1, h1 = _s_bounds(xi, q1, a1, w)
        l2, h2 = _s_bounds(xi, q2, a2, w)
        if h1 ** s * q2 * q2 < l2 ** s * q1 * q1:
            return -1
        if h2 ** s * q1 * q1 < l1 ** s * q2 * q2:
            return 1
        if w >= _TIE_CHECK_W and not tie_checked:
            tie_checked = True
            if exprs_equal(_w_expr(xi, q1, a1, s), _w_expr(xi, q2, a2, s)):
                return 0
        w *= 2
    raise PrecisionExhausted(f"undecided strict comparison between q={q1} a={a1} and q={q2} a={a2}")


def _separable_index(f: Poly, s: int) -> Optional[int]:
    """Index j such that x_j occurs only in a single pure power term c*x_j^s."""
    for j in range(f.dim - 1, -1, -1):
        involving = [e for e in f.terms if e[j]]
        if len(involving) == 1 and involving[0][j] == s:
            return j
    return None


class _Walker:
    """Pruned per-q enumeration of the points of {f = 1} near q*xi."""

    def __init__(self, f: Poly, xi, seed_scale: int = 2, psi_bound: Optional[Fraction] = None):
        self.s = f.require_homogeneous()
        if len(xi) != f.dim:
            raise ValueError(f"dimension mismatch: polynomial has {f.dim} variables, got {len(xi)}")
        xi = [parse_expr(x) if isinstance(x, str) else x for x in xi]
        if all(as_rational(x) is not None for x in xi):
            raise ValueError("xi is rational: rational target")
        self.f, self.xi = f, _Xi(xi)
        self.D = f.denominator
        self.terms = _int_terms(f)
        self.seed_scale = seed_scale
        self.psi_hi = Fraction(psi_bound) if psi_bound is not None else None
        self.sep = _separable_index(f, self.s)
        if self.sep is not None:
            j = self.sep
            self.sep_coef = next(c for c, e in self.terms if e[j])
            self.rest_terms = [(c, e) for c, e in self.terms if not e[j]]

    def radius(self, q: int) -> int:
        if self.psi_hi is None:
            return self.seed_scale * q
        return iroot(ceil(q * self.psi_hi), self.s) + 1

    def points(self, q: int) -> list:
        r = self.radius(q)
        encl = self.xi.at(64)
        ranges = [((q * lo >> 64) - r, -((-q * hi) >> 64) + r) for lo, hi in encl]
        target = self.D * q ** self.s
        s = self.s
        out = []
        if self.sep is None:
            for a in _box(ranges):
                if _eval_terms(self.terms, a) == target:
                    out.append(a)
            return out
        j = self.sep
        lo_j, hi_j = ranges[j]
        others = ranges[:j] + ranges[j + 1:]
        for b in _box(others):
            num = target - _eval_terms(self.rest_terms, b[:j] + (0,) + b[j:])
            if num % self.sep_coef:
                continue
            y = num // self.sep_coef
            if y < 0 and s % 2 == 0:
                continue
            x = iroot(abs(y), s)
            if x ** s != abs(y):
                continue
            cands = {x, -x} if s % 2 == 0 else {x if y >= 0 else -x}
            for x in cands:
                if lo_j <= x <= hi_j:
                    out.append(b[:j] + (x,) + b[j:])
        out.sort()
        return out


def _walk(f, xi, tmax, seed_scale, psi_bound, p, collect_points: bool):
    if tmax < 1:
        raise ValueError("tmax must be >= 1")
    walker = _Walker(f, xi, seed_scale, psi_bound)
    s = walker.s
    best = None
    breakpoints, pts = [], []
    for q in range(1, tmax + 1):
        cands = walker.points(q)
        if collect_points:
            pts.extend(RationalPoint(q, a) for a in cands)
        best_q = None
        for a in cands:
            c = (q, a)
            if best is not None and _compare(walker.xi, s, c, best) >= 0:
                continue
            if best_q is None:
                best_q = c
                continue
            sign = _compare(walker.xi, s, c, best_q)
            if sign < 0 or (sign == 0 and a < best_q[1]):
                best_q = c
        if best_q is not None:
            best = best_q
            point = RationalPoint(*best)
            psi = ball_eval(psi_value(walker.xi.exprs, point, s), p)
            breakpoints.append(PsiBreakpoint(q, point, psi, walker.xi.exprs))
            if walker.psi_hi is None or psi.hi < walker.psi_hi:
                walker.psi_hi = psi.hi
    if not breakpoints and psi_bound is None:
        raise EmptyWindowError(f"empty variety window: no point of f = 1 found with q <= {tmax}")
    return breakpoints, pts


def variety_points(f: Poly, xi, tmax: int, seed_scale: int = 2, psi_bound=None) -> list:
    """Points of {f = 1} with q <= tmax inside the running pruning box.

    The box |a_i - q xi_i| <= r_q, r_q >= (q * Psi_best)^(1/s), contains every
    point that can lower the running minimum of Psi.  Before the first point is
    found the box has radius ``seed_scale * q`` (unpruned for the sphere).
    """
    return _walk(f, xi, tmax, seed_scale, psi_bound, 64, True)[1]


def psi_breakpoints(f: Poly, xi, tmax: int, p: int = 64, seed_scale: int = 2, psi_bound=None) -> list:
    """Breakpoints of Psi_{f,xi} on [1, tmax] with certified strict decrease.

    Within one q the lexicographically smallest minimizer is reported.
    """
    return _walk(f, xi, tmax, seed_scale, psi_bound, p, False)[0]


# ---------------------------------------------------------------------------
# near points via stereographic projection


def stereo_project(x: Sequence[Fraction]) -> tuple:
    """Projection from the pole (1, 0, ..., 0) to the hyperplane x_1 = 0."""
    x = [Fraction(v) for v in x]
    if x[0] == 1:
        raise ValueError("point is the projection pole")
    return tuple(v / (1 - x[0]) for v in x[1:])


def stereo_lift(u: Sequence[Fraction]) -> tuple:
    """Inverse of stereo_project."""
    u = [Fraction(v) for v in u]
    S = sum(v * v for v in u)
    return ((S - 1) / (S + 1),) + tuple(2 * v / (S + 1) for v in u)


def _lift_integer(v: Sequence[int], n: int) -> RationalPoint:
    S = sum(x * x for x in v)
    return RationalPoint(S + n * n, (S - n * n,) + tuple(2 * x * n for x in v)).reduced()


def point_near(xi, t: int, p: int = 64) -> NearPoint:
    """A rational sphere point a/q with q <= t close to xi (|xi| = 1 assumed).

    Coordinates are permuted so the smallest one faces the pole; then for
    every n <= sqrt(t) the projection is rounded to denominator n and lifted
    back.  The candidate with the best quality |xi - a/q| sqrt(q t) wins.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    xi = [parse_expr(x) if isinstance(x, str) else x for x in xi]
    d = len(xi)
    if d < 2:
        raise ValueError("need d >= 2")
    centers = [ball_eval(x, p).center for x in xi]
    order = sorted(range(d), key=lambda i: (centers[i], i))
    first = order[0]
    perm = [first] + [i for i in range(d) if i != first]
    x1 = ball_eval(xi[first], p)
    if x1.hi >= 1 - Fraction(1, 1 << p):
        raise ValueError("target within 2^-p of the projection pole")
    u = [ball_eval(xi[i] / (1 - xi[first]), p).center for i in perm[1:]]
    best = None
    for n in range(1, isqrt(t) + 1):
        v = [round(n * c) for c in u]
        pt = _lift_integer(v, n)
        if pt.q > t:
            continue
        a = [0] * d
        for slot, i in enumerate(perm):
            a[i] = pt.a[slot]
        cand = RationalPoint(pt.q, tuple(a))
        err = sum((power(x - Fraction(ai, cand.q), 2) for x, ai in zip(xi, cand.a)), const(0))
        key = ball_eval(sqrt(err * cand.q * t), p)
        if best is None or key.center < best[1].center:
            best = (cand, key)
    if best is None:
        raise ValueError(f"no rational point with q <= {t} found")
    cand, quality = best
    return NearPoint(cand.q, cand.a, quality)


# ---------------------------------------------------------------------------
# intrinsic uniform exponent


def intrinsic_uniform_exponent(breakpoints: Sequence[PsiBreakpoint], tail_fraction=Fraction(1, 2)) -> Ball:
    """min of -log Psi(q_nu) / log q_{nu+1} over consecutive pairs within the
    last tail_fraction of the breakpoints (at least two of them)."""
    if len(breakpoints) < 3:
        raise ValueError("need at least 3 breakpoints")
    for b0, b1 in zip(breakpoints, breakpoints[1:]):
        if not (b0.q < b1.q and b1.psi.hi < b0.psi.lo):
            raise ValueError(f"psi does not strictly decrease between q={b0.q} and q={b1.q}")
    k = max(2, ceil(len(breakpoints) * Fraction(tail_fraction)))
    tail = breakpoints[-k:]
    rows = []
    for b0, b1 in zip(tail, tail[1:]):
        if b0.psi.lo <= 0:
            raise ArithmeticError("psi enclosure touches 0")
        l_lo, _ = log_bounds(b0.psi.lo)
        _, l_hi = log_bounds(b0.psi.hi)
        num_lo, num_hi = -l_hi, -l_lo
        g_lo, g_hi = log_bounds(Fraction(b1.q))
        lo = num_lo / (g_hi if num_lo >= 0 else g_lo)
        hi = num_hi / (g_lo if num_hi >= 0 else g_hi)
        rows.append(Ball.from_bounds(lo, hi))
    return Ball.from_bounds(min(b.lo for b in rows), min(b.hi for b in rows))


# ---------------------------------------------------------------------------
# CSV


def breakpoints_to_csv(breakpoints: Sequence[PsiBreakpoint], d: int, s: int, tmax: int, digits: int = 20) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q"] + [f"a_{i + 1}" for i in range(d)] + ["psi_lo", "psi_hi", "T_pow_s_minus_1_times_psi_lo"])
    for i, b in enumerate(breakpoints):
        T = breakpoints[i + 1].q - 1 if i + 1 < len(breakpoints) else tmax
        w.writerow(
            [b.q, *b.point.a, fraction_to_decimal(b.psi.lo, digits), fraction_to_decimal(b.psi.hi, digits, up=True),
             fraction_to_decimal(T ** (s - 1) * b.psi.lo, digits)]
        )
    return buf.getvalue()


def breakpoints_from_csv(text: str) -> list:
    rows = list(csv.reader(io.StringIO(text)))
    d = len(rows[0]) - 4
    out = []
    for row in rows[1:]:
        q = int(row[0])
        out.append(PsiBreakpoint(q, RationalPoint(q, tuple(int(x) for x in row[1 : 1 + d])),
                                 Ball.from_bounds(Fraction(row[1 + d]), Fraction(row[2 + d]))))
    return out
