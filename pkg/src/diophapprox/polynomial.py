"""Rational-coefficient polynomials in d variables.

Text format::

    # comment
    d s                 # s = 0 marks a non-homogeneous polynomial
    s_1 ... s_d coeff   # one term per line, coeff is an integer or n/d

``sphere:d`` is accepted wherever a polynomial source is expected.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Mapping, Optional, Sequence

from .exact import Ball, Const, RealExpr, power

__all__ = [
    "Poly",
    "FormConstants",
    "PolySyntaxError",
    "parse_poly",
    "load_poly",
    "sphere",
    "eval_rational",
    "eval_ball",
    "eval_integer_scaled",
    "constants",
    "poly_expr",
]


class PolySyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Poly:
    dim: int
    terms: Mapping[tuple, Fraction]
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        clean = {}
        for exps, c in self.terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.dim:
                raise ValueError(f"exponent tuple {exps} does not have {self.dim} entries")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = Fraction(c)
            if c:
                clean[exps] = c
        object.__setattr__(self, "terms", dict(sorted(clean.items(), reverse=True)))

    def __hash__(self):
        return hash((self.dim, tuple(self.terms.items())))

    @property
    def homogeneous_degree(self) -> Optional[int]:
        degrees = {sum(e) for e in self.terms}
        if len(degrees) == 1:
            (s,) = degrees
            return s if s > 0 else None
        return None

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    @property
    def denominator(self) -> int:
        """D(f): least common denominator of the coefficients."""
        return lcm(*(c.denominator for c in self.terms.values())) if self.terms else 1

    def require_homogeneous(self) -> int:
        s = self.homogeneous_degree
        if s is None:
            raise ValueError("polynomial is not homogeneous")
        return s

    def __call__(self, *x):
        return eval_rational(self, x)

    def __str__(self):
        if self.name:
            return self.name
        parts = []
        for exps, c in self.terms.items():
            mono = "*".join(f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(exps) if e)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts) or "0"

    def to_text(self) -> str:
        lines = [f"{self.dim} {self.homogeneous_degree or 0}"]
        for exps, c in self.terms.items():
            lines.append(" ".join(str(e) for e in exps) + f" {c}")
        return "\n".join(lines) + "\n"


def sphere(d: int) -> Poly:
    """x_1^2 + ... + x_d^2."""
    terms = {tuple(2 if i == j else 0 for j in range(d)): Fraction(1) for i in range(d)}
    return Poly(d, terms, name=f"sphere:{d}")


def parse_poly(text: str) -> Poly:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise PolySyntaxError("empty polynomial text")
    if len(rows[0]) != 2:
        raise PolySyntaxError(f"malformed header line: {' '.join(rows[0])!r}")
    try:
        d, s = int(rows[0][0]), int(rows[0][1])
    except ValueError:
        raise PolySyntaxError(f"malformed header line: {' '.join(rows[0])!r}") from None
    if d < 1 or s < 0:
        raise PolySyntaxError("header needs d >= 1 and s >= 0")
    terms: dict = {}
    for row in rows[1:]:
        if len(row) != d + 1:
            raise PolySyntaxError(f"exponent count != {d} in line {' '.join(row)!r}")
        try:
            exps = tuple(int(x) for x in row[:d])
            coef = Fraction(row[d])
        except (ValueError, ZeroDivisionError):
            raise PolySyntaxError(f"malformed line {' '.join(row)!r}") from None
        if any(e < 0 for e in exps):
            raise PolySyntaxError(f"negative exponent in line {' '.join(row)!r}")
        if exps in terms:
            raise PolySyntaxError(f"duplicate exponent tuple {exps}")
        terms[exps] = coef
    f = Poly(d, terms)
    hs = f.homogeneous_degree
    if s and hs is not None and hs != s:
        raise PolySyntaxError(f"header degree {s} but all terms have degree {hs}")
    return f


def load_poly(source: str) -> Poly:
    """Parse ``sphere:d``, a file path, or inline polynomial text."""
    if source.startswith("sphere:"):
        try:
            d = int(source.split(":", 1)[1])
        except ValueError:
            raise PolySyntaxError(f"bad alias {source!r}") from None
        if d < 1:
            raise PolySyntaxError("sphere dimension must be >= 1")
        return sphere(d)
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            f = parse_poly(fh.read())
        return f
    if "\n" in source:
        return parse_poly(source)
    raise FileNotFoundError(source)


def _check_dim(f: Poly, x: Sequence) -> None:
    if len(x) != f.dim:
        raise ValueError(f"dimension mismatch: polynomial has {f.dim} variables, got {len(x)}")


def eval_rational(f: Poly, x: Sequence) -> Fraction:
    _check_dim(f, x)
    x = [Fraction(v) for v in x]
    total = Fraction(0)
    for exps, c in f.terms.items():
        t = c
        for xi, e in zip(x, exps):
            if e:
                t *= xi ** e
        total += t
    return total


def eval_integer_scaled(f: Poly, a: Sequence[int], q: int) -> int:
    """``D * q**s * f(a/q)`` as an exact integer, s the total degree."""
    _check_dim(f, a)
    D, s = f.denominator, f.degree
    total = 0
    for exps, c in f.terms.items():
        t = c.numerator * (D // c.denominator) * q ** (s - sum(exps))
        for ai, e in zip(a, exps):
            if e:
                t *= ai ** e
        total += t
    return total


def eval_ball(f: Poly, x: Sequence[Ball]) -> Ball:
    """Ball containing f over the box spanned by ``x``."""
    _check_dim(f, x)
    total = Ball(Fraction(0))
    for exps, c in f.terms.items():
        t = Ball(c)
        for xi, e in zip(x, exps):
            if e:
                t = t * (xi ** e)
        total = total + t
    return total


def poly_expr(f: Poly, x: Sequence[RealExpr]) -> RealExpr:
    """Expression tree for f(x)."""
    _check_dim(f, x)
    out = None
    for exps, c in f.terms.items():
        t: RealExpr = Const(c)
        for xi, e in zip(x, exps):
            if e:
                t = t * power(xi, e)
        out = t if out is None else out + t
    return out if out is not None else Const(Fraction(0))


@dataclass(frozen=True)
class FormConstants:
    D: int
    K_upper: Fraction
    K_exact: Optional[Fraction] = None

    @property
    def K_bar(self) -> Fraction:
        """The sup-norm value used in checks: exact if known, else the bound."""
        return self.K_exact if self.K_exact is not None else self.K_upper


def _diagonal_quadratic_sup(f: Poly) -> Optional[Fraction]:
    # sup of |sum c_i x_i^2| on the unit sphere is max |c_i| (extremes at basis vectors)
    if f.homogeneous_degree != 2:
        return None
    if not all(sorted(e) == [0] * (f.dim - 1) + [2] for e in f.terms):
        return None
    coefs = list(f.terms.values())
    if len(coefs) < f.dim:
        coefs.append(Fraction(0))
    return max(abs(max(coefs)), abs(min(coefs)))


def constants(f: Poly, k_exact=None) -> FormConstants:
    """D(f) and certified bounds for K(f) = sup_{|x|=1} |f(x)|.

    ``K_upper`` is the sum of absolute coefficients.  When ``k_exact`` is not
    given and f is a diagonal quadratic form, the closed-form supremum is used.
    """
    f.require_homogeneous()
    D = f.denominator
    k_upper = sum((abs(c) for c in f.terms.values()), Fraction(0))
    if k_exact is None:
        k_exact = _diagonal_quadratic_sup(f)
    else:
        k_exact = Fraction(k_exact)
        if k_exact > k_upper:
            raise ValueError(f"k_exact={k_exact} exceeds the certified bound {k_upper}")
        s = f.homogeneous_degree
        basis_max = max(
            (abs(c) for e, c in f.terms.items() if max(e) == s), default=Fraction(0)
        )
        if k_exact < basis_max:
            raise ValueError(f"k_exact={k_exact} is below |f| at a basis vector ({basis_max})")
    return FormConstants(D=D, K_upper=k_upper, K_exact=k_exact)
