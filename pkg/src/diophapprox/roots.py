"""Certified bisection for the exponent-bound constants H_d, H_{d,s} and G_m.

Each defining equation is cleared to an integer-coefficient polynomial F that
is negative at 0+ and changes sign exactly once on (0, upper].  The root is
bracketed by exact rational evaluation only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import Ball, ball_eval, parse_expr

__all__ = [
    "RootResult",
    "solve_H",
    "solve_Hds",
    "solve_G",
    "H_poly",
    "Hds_poly",
    "G_poly",
    "closed_form_d1",
]

GRID_POINTS = 1 << 10


@dataclass(frozen=True)
class RootResult:
    value: Ball
    residual_bound: Fraction
    equation: str
    coefficients: tuple = ()

    @property
    def lo(self) -> Fraction:
        return self.value.lo

    @property
    def hi(self) -> Fraction:
        return self.value.hi


def _horner(coefs: tuple, x: Fraction) -> Fraction:
    # coefs[i] is the coefficient of x**i
    acc = Fraction(0)
    for c in reversed(coefs):
        acc = acc * x + c
    return acc


def H_poly(d: int) -> tuple:
    """x^{d+1} + ... + x - 1."""
    return (-1,) + (1,) * (d + 1)


def Hds_poly(d: int, s: int) -> tuple:
    """(s-1)^d (x - 1) + sum_k (s-1)^{d-k} x^{k+1}, the cleared form of
    (1 - x) = x * sum_{k=1}^{d} (x/(s-1))^k."""
    t = s - 1
    coefs = [0] * (d + 2)
    coefs[0] = -(t ** d)
    coefs[1] = t ** d
    for k in range(1, d + 1):
        coefs[k + 1] += t ** (d - k)
    return tuple(coefs)


def G_poly(m: int, omega_hat: Fraction) -> tuple:
    """(v-u) x^{m-1} - u (x^{m-2} + ... + 1) for omega_hat = u/v."""
    u, v = omega_hat.numerator, omega_hat.denominator
    return tuple([-u] * (m - 1) + [v - u])


def _sign_at(coefs: tuple, n: int, den: int) -> int:
    """Sign of F(n/den) via the homogenized integer form sum c_i n^i den^{deg-i}."""
    deg = len(coefs) - 1
    acc = coefs[deg]
    for i in range(deg - 1, -1, -1):
        acc = acc * n + coefs[i] * den ** (deg - i)
    return (acc > 0) - (acc < 0)


def _bisect(coefs: tuple, upper: Fraction, p: int, tag: str) -> RootResult:
    if coefs[0] >= 0:
        raise ArithmeticError(f"{tag}: polynomial not negative at 0")
    # sign pattern on a coarse grid: exactly one change, from - to +
    un, ud = upper.numerator, upper.denominator * GRID_POINTS
    signs = [-1] + [_sign_at(coefs, un * i, ud) for i in range(1, GRID_POINTS + 1)]
    changes = [i for i in range(1, len(signs)) if signs[i] != signs[i - 1]]
    if not changes:
        raise ArithmeticError(f"{tag}: no sign change on (0, {upper}]")
    if len(changes) > 2 or (len(changes) == 2 and signs[changes[0]] != 0):
        raise ArithmeticError(f"{tag}: more than one sign change")
    change_at = changes[0]
    if signs[change_at] == 0:
        return RootResult(Ball(Fraction(un * change_at, ud)), Fraction(0), tag, coefs)
    # bracket [lo/den, hi/den]; den doubles each step
    lo, hi, den = un * (change_at - 1), un * change_at, ud
    while Fraction(hi - lo, den) > Fraction(1, 1 << max(p - 1, 0)):
        lo, hi, den = 2 * lo, 2 * hi, 2 * den
        mid = (lo + hi) // 2
        sgn = _sign_at(coefs, mid, den)
        if sgn == 0:
            return RootResult(Ball(Fraction(mid, den)), Fraction(0), tag, coefs)
        if sgn < 0:
            lo = mid
        else:
            hi = mid
    flo, fhi = Fraction(lo, den), Fraction(hi, den)
    residual = max(abs(_horner(coefs, flo)), abs(_horner(coefs, fhi)))
    return RootResult(Ball.from_bounds(flo, fhi), residual, tag, coefs)


def solve_H(d: int, p: int = 64) -> RootResult:
    """Positive root of x^{d+1} + x^d + ... + x = 1, a number in (1/2, 1)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return _bisect(H_poly(d), Fraction(1), p, f"H({d})")


def solve_Hds(d: int, s: int, p: int = 64) -> RootResult:
    """Positive root of (1 - x) = x * sum_{k=1}^{d} (x/(s-1))^k."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if s < 2:
        raise ValueError("s must be >= 2")
    return _bisect(Hds_poly(d, s), Fraction(1), p, f"Hds({d}, {s})")


def solve_G(m: int, omega_hat, p: int = 64) -> RootResult:
    """Positive root of x^{m-1} = w/(1-w) * (x^{m-2} + ... + 1), w = omega_hat."""
    if m < 2:
        raise ValueError("m must be >= 2")
    w = Fraction(omega_hat)
    if not 0 < w < 1:
        raise ValueError("omega_hat must lie in (0, 1)")
    # every root is below 1 + w/(1-w) (Cauchy bound)
    upper = 1 + w / (1 - w) + 1
    return _bisect(G_poly(m, w), upper, p, f"G({m}, {w})")


def closed_form_d1(s: int, p: int = 64) -> Ball:
    """(sqrt((s-1)(s+3)) - (s-1)) / 2, the d = 1 case of H_{d,s}."""
    e = parse_expr(f"(sqrt({(s - 1) * (s + 3)}) - {s - 1}) / 2")
    return ball_eval(e, p)
