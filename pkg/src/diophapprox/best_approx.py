"""Best simultaneous approximation vectors.

A vector (q, a_1, ..., a_m) is recorded when dist(q*Theta, Z^m) in the sup
norm is strictly smaller than for every smaller positive q.  ``scan`` finds
all such q up to a bound in two tiers:

1. a vectorized numpy pass computes q*theta_j mod 1 in exact 64-bit fixed
   point (uint64 wraparound is reduction mod 2**64) together with a rigorous
   error term, and discards every q whose distance is certifiably no smaller
   than an earlier one;
2. the few survivors are compared against the current record with
   adaptive-precision ball arithmetic.

Both tiers use only integer arithmetic, so every decision is exact.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .exact import (
    P_MAX,
    Ball,
    PrecisionExhausted,
    RealExpr,
    _Straddle,
    as_rational,
    enclose,
    fraction_to_decimal,
    parse_expr,
    power,
)
from .polynomial import Poly, poly_expr

__all__ = [
    "Target",
    "BestApproxRecord",
    "RationalTargetError",
    "UndecidedComparison",
    "distance",
    "scan",
    "lift_square",
    "lift_poly",
    "records_to_csv",
    "records_from_csv",
]

DEFAULT_CHUNK = 1 << 16
_U64 = np.uint64
_MAXU = np.iinfo(np.uint64).max


class RationalTargetError(ValueError):
    pass


class UndecidedComparison(PrecisionExhausted):
    def __init__(self, q, k):
        super().__init__(f"undecided strict comparison between q={q} and q={k} at p_max={P_MAX}")
        self.q, self.k = q, k


@dataclass(frozen=True)
class Target:
    coordinates: tuple
    irrationality_asserted: bool = True

    def __post_init__(self):
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        if not self.coordinates:
            raise ValueError("empty target")

    @classmethod
    def parse(cls, text: str, irrationality_asserted: bool = True) -> "Target":
        from .exact import parse_expr_list

        return cls(tuple(parse_expr_list(text)), irrationality_asserted)

    @property
    def m(self) -> int:
        return len(self.coordinates)

    def rational_coordinates(self) -> list:
        """Indices of coordinates that simplify to an exact rational."""
        return [i for i, c in enumerate(self.coordinates) if as_rational(c) is not None]

    def __str__(self):
        return ", ".join(str(c) for c in self.coordinates)


@dataclass(frozen=True)
class BestApproxRecord:
    index: int
    q: int
    a: tuple
    zeta: Ball

    @property
    def alpha(self) -> tuple:
        return tuple(Fraction(x, self.q) for x in self.a)


# ---------------------------------------------------------------------------
# single distance


def _coord_distance(theta: RealExpr, q: int, p: int):
    """Nearest integer a to q*theta and an enclosure (lo, hi) of |q*theta - a|."""
    r = as_rational(theta)
    if r is not None:
        x = q * r
        a = (x + Fraction(1, 2)).__floor__()
        if x - (a - 1) == a - x:  # exact half-integer: take the smaller integer
            a -= 1
        d = abs(x - a)
        return a, d, d
    w = ((p + q.bit_length() + 2 + 31) // 32) * 32
    cap = 4 * P_MAX
    while True:
        try:
            lo, hi = enclose(theta, w)
        except _Straddle:
            lo = hi = None
        if lo is not None:
            qlo, qhi = q * lo, q * hi
            half = 1 << (w - 1)
            a_lo, a_hi = (qlo + half) >> w, (qhi + half) >> w
            if a_lo == a_hi and (qhi - qlo) <= 1 << max(w + 1 - p, 0):
                a = a_lo
                dlo, dhi = qlo - (a << w), qhi - (a << w)
                if dlo >= 0:
                    pass
                elif dhi <= 0:
                    dlo, dhi = -dhi, -dlo
                else:
                    dlo, dhi = 0, max(-dlo, dhi)
                return a, Fraction(dlo, 1 << w), Fraction(dhi, 1 << w)
        if w >= cap:
            raise PrecisionExhausted(f"precision exhausted locating round(q*theta) for q={q}")
        w *= 2


def distance(target: Target, q: int, p: int = 64) -> tuple:
    """``(a, zeta)``: nearest integer vector to q*Theta and a ball for the sup distance."""
    if q < 1:
        raise ValueError("q must be >= 1")
    a, lo, hi = [], Fraction(0), Fraction(0)
    for theta in target.coordinates:
        aj, dlo, dhi = _coord_distance(theta, q, p)
        a.append(aj)
        lo, hi = max(lo, dlo), max(hi, dhi)
    return tuple(a), Ball.from_bounds(lo, hi)


# ---------------------------------------------------------------------------
# scan


def _fixed_point(theta: RealExpr):
    """(N, R): theta lies in [N, N + R] / 2**64 modulo 1, as exact integers."""
    r = as_rational(theta)
    w = 128
    while True:
        try:
            lo, hi = enclose(theta, w)
            break
        except _Straddle:
            w *= 2
            if w > 4 * P_MAX:
                raise
    lo64 = lo >> (w - 64)
    hi64 = -((-hi) >> (w - 64))
    if r is not None and lo64 == hi64:
        return lo64 % (1 << 64), 0
    return lo64 % (1 << 64), hi64 - lo64


def _chunk_bounds(params, start: int, stop: int):
    """Distance bounds (units 2**-64) for q in [start, stop)."""
    qs = np.arange(start, stop, dtype=_U64)
    d_lo = np.zeros(len(qs), dtype=_U64)
    d_hi = np.zeros(len(qs), dtype=_U64)
    for n, rad in params:
        frac = qs * _U64(n)  # wraps mod 2**64
        dist = np.minimum(frac, _U64(0) - frac)
        err = qs * _U64(rad)
        lo = np.where(dist > err, dist - err, _U64(0))
        hi = dist + err
        np.maximum(d_lo, lo, out=d_lo)
        np.maximum(d_hi, hi, out=d_hi)
    return d_lo, d_hi


def _chunk_candidates(params, start: int, stop: int):
    d_lo, d_hi = _chunk_bounds(params, start, stop)
    prefix = np.minimum.accumulate(d_hi)
    excl = np.empty_like(prefix)
    excl[0] = _MAXU
    excl[1:] = prefix[:-1]
    idx = np.nonzero(d_lo < excl)[0]
    return (
        start,
        [int(i) + start for i in idx],
        [int(v) for v in d_lo[idx]],
        [int(v) for v in excl[idx]],
        int(prefix[-1]),
    )


class _Incumbent:
    def __init__(self, target: Target):
        self.target = target
        self._cache: dict = {}

    def dist(self, q: int, p: int):
        key = (q, p)
        if key not in self._cache:
            if len(self._cache) > 64:
                self._cache.clear()
            self._cache[key] = distance(self.target, q, p)
        return self._cache[key]


def _strictly_less(inc: _Incumbent, q: int, k: int):
    """Certify dist(q) < dist(k) or dist(q) >= dist(k); returns (bool, a_q, z_q, z_k)."""
    p = 64
    while p <= P_MAX:
        a_q, z_q = inc.dist(q, p)
        _, z_k = inc.dist(k, p)
        if z_q.hi == 0:
            raise RationalTargetError(f"zero distance at q={q}: rational target")
        if z_q.hi < z_k.lo:
            return True, a_q, z_q, z_k
        if z_q.lo >= z_k.hi:
            return False, a_q, z_q, z_k
        p *= 2
    raise UndecidedComparison(q, k)


def _check_scannable(target: Target) -> None:
    if not target.irrationality_asserted:
        raise RationalTargetError("scan requires the caller to assert total irrationality")
    rat = target.rational_coordinates()
    if rat:
        raise RationalTargetError(
            f"coordinate(s) {[i + 1 for i in rat]} simplify to rationals: rational target"
        )


def scan(
    target: Target,
    qmax: int,
    threads: int = 1,
    chunk: int = DEFAULT_CHUNK,
    p: int = 64,
) -> list:
    """All best approximation vectors with q <= qmax, in increasing q.

    The output does not depend on ``threads`` or ``chunk``.
    """
    if qmax < 1:
        raise ValueError("qmax must be >= 1")
    _check_scannable(target)
    params = [_fixed_point(t) for t in target.coordinates]
    bounds = [(s, min(s + chunk, qmax + 1)) for s in range(1, qmax + 1, chunk)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda b: _chunk_candidates(params, *b), bounds))
    else:
        results = [_chunk_candidates(params, *b) for b in bounds]

    inc = _Incumbent(target)
    records: list = []
    global_hi = int(_MAXU)
    for _, qs, los, excls, chunk_min in results:
        for q, lo, excl in zip(qs, los, excls):
            if lo >= min(global_hi, excl):
                continue
            if not records:
                a, z = inc.dist(q, p)
                if z.hi == 0:
                    raise RationalTargetError(f"zero distance at q={q}: rational target")
                records.append(BestApproxRecord(1, q, a, z))
                continue
            last = records[-1]
            better, a_q, z_q, z_k = _strictly_less(inc, q, last.q)
            if better:
                if z_k.radius < last.zeta.radius:
                    records[-1] = BestApproxRecord(last.index, last.q, last.a, z_k)
                records.append(BestApproxRecord(len(records) + 1, q, a_q, z_q))
        global_hi = min(global_hi, chunk_min)
    for rec in records:
        if gcd(rec.q, *rec.a) != 1:
            raise AssertionError(f"non-primitive record at q={rec.q}")
    return records


# ---------------------------------------------------------------------------
# lifted targets


def lift_square(xi: Sequence, irrationality_asserted: bool = True) -> Target:
    """(xi_1, ..., xi_d, xi_1^2 + ... + xi_d^2)."""
    xi = [parse_expr(x) if isinstance(x, str) else x for x in xi]
    if not xi:
        raise ValueError("empty xi")
    total = power(xi[0], 2)
    for x in xi[1:]:
        total = total + power(x, 2)
    return Target(tuple(xi) + (total,), irrationality_asserted)


def lift_poly(f: Poly, xi: Sequence, irrationality_asserted: bool = True) -> Target:
    """(xi_1, ..., xi_d, f(xi))."""
    xi = [parse_expr(x) if isinstance(x, str) else x for x in xi]
    if len(xi) != f.dim:
        raise ValueError(f"dimension mismatch: polynomial has {f.dim} variables, got {len(xi)}")
    return Target(tuple(xi) + (poly_expr(f, xi),), irrationality_asserted)


# ---------------------------------------------------------------------------
# CSV


def records_to_csv(records: Iterable[BestApproxRecord], m: int, digits: int = 20) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["nu", "q"] + [f"a_{j + 1}" for j in range(m)] + ["zeta_lo", "zeta_hi"])
    for r in records:
        writer.writerow(
            [r.index, r.q, *r.a, fraction_to_decimal(r.zeta.lo, digits), fraction_to_decimal(r.zeta.hi, digits, up=True)]
        )
    return buf.getvalue()


def records_from_csv(text: str) -> list:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    m = len(header) - 4
    out = []
    for row in body:
        nu, q = int(row[0]), int(row[1])
        a = tuple(int(x) for x in row[2 : 2 + m])
        out.append(BestApproxRecord(nu, q, a, Ball.from_bounds(Fraction(row[-2]), Fraction(row[-1]))))
    return out
