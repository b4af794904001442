"""Exact rationals, certified ball enclosures and radical expression targets.

Every real number the library handles is either a :class:`fractions.Fraction`
or a :class:`RealExpr` tree built from rationals with ``+ - * /`` and integer
roots.  Expressions are evaluated to :class:`Ball` enclosures using integer
interval arithmetic with directed rounding; no floating point enters the
certified path.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, isqrt
from typing import Iterable, Optional, Union

__all__ = [
    "P_MAX",
    "Ball",
    "RealExpr",
    "Const",
    "Neg",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Root",
    "Ordering",
    "PrecisionExhausted",
    "IndeterminateSign",
    "ExpressionSyntaxError",
    "rat_normalize",
    "const",
    "sqrt",
    "root",
    "power",
    "ball_eval",
    "ball_compare",
    "as_rational",
    "exprs_equal",
    "enclose",
    "parse_expr",
    "parse_expr_list",
    "iroot",
]

#: Precision cap (bits) for every adaptive refinement ladder.
P_MAX = 4096

Number = Union[int, Fraction]


class PrecisionExhausted(ArithmeticError):
    """Raised when an enclosure cannot be made tight enough within the cap."""


class IndeterminateSign(PrecisionExhausted):
    """A divisor or even-root radicand still straddles 0 at the precision cap."""


class ExpressionSyntaxError(ValueError):
    pass


def rat_normalize(n: int, d: int) -> Fraction:
    """Reduced fraction ``n/d`` with positive denominator."""
    if d == 0:
        raise ZeroDivisionError("division by zero")
    return Fraction(n, d)


# ---------------------------------------------------------------------------
# integer roots


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 0:
        raise ValueError("negative radicand")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return isqrt(n)
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def _iroot_ceil(n: int, k: int) -> int:
    r = iroot(n, k)
    return r if r ** k == n else r + 1


# ---------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class Ball:
    """Closed interval ``[center - radius, center + radius]`` with rational data."""

    center: Fraction
    radius: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        object.__setattr__(self, "radius", Fraction(self.radius))
        if self.radius < 0:
            raise ValueError("negative radius")

    @classmethod
    def from_bounds(cls, lo, hi) -> "Ball":
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("empty interval")
        return cls((lo + hi) / 2, (hi - lo) / 2)

    @property
    def lo(self) -> Fraction:
        return self.center - self.radius

    @property
    def hi(self) -> Fraction:
        return self.center + self.radius

    def contains(self, x) -> bool:
        if isinstance(x, Ball):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Ball") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __add__(self, other):
        other = _as_ball(other)
        return Ball(self.center + other.center, self.radius + other.radius)

    __radd__ = __add__

    def __neg__(self):
        return Ball(-self.center, self.radius)

    def __sub__(self, other):
        return self + (-_as_ball(other))

    def __rsub__(self, other):
        return _as_ball(other) - self

    def __mul__(self, other):
        other = _as_ball(other)
        return Ball(
            self.center * other.center,
            abs(self.center) * other.radius
            + abs(other.center) * self.radius
            + self.radius * other.radius,
        )

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        out = Ball(Fraction(1))
        for _ in range(k):
            out = out * self
        return out

    def __abs__(self):
        lo, hi = self.lo, self.hi
        if lo >= 0:
            return self
        if hi <= 0:
            return -self
        return Ball.from_bounds(0, max(-lo, hi))

    def __str__(self):
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def _as_ball(x) -> Ball:
    return x if isinstance(x, Ball) else Ball(Fraction(x))


# ---------------------------------------------------------------------------
# expression trees


class RealExpr:
    """Base class of radical expression nodes (immutable, hashable)."""

    def __add__(self, other):
        return Add(self, _wrap(other))

    def __radd__(self, other):
        return Add(_wrap(other), self)

    def __sub__(self, other):
        return Sub(self, _wrap(other))

    def __rsub__(self, other):
        return Sub(_wrap(other), self)

    def __mul__(self, other):
        return Mul(self, _wrap(other))

    def __rmul__(self, other):
        return Mul(_wrap(other), self)

    def __truediv__(self, other):
        return Div(self, _wrap(other))

    def __rtruediv__(self, other):
        return Div(_wrap(other), self)

    def __neg__(self):
        return Neg(self)

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))


def _wrap(x) -> RealExpr:
    if isinstance(x, RealExpr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    raise TypeError(f"cannot use {type(x).__name__} in a RealExpr")


@dataclass(frozen=True, eq=True)
class Const(RealExpr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    def __str__(self):
        v = self.value
        if v.denominator == 1:
            return str(v.numerator) if v >= 0 else f"({v.numerator})"
        return f"({v.numerator}/{v.denominator})"

    __hash__ = RealExpr.__hash__


@dataclass(frozen=True, eq=True)
class Neg(RealExpr):
    x: RealExpr

    def __str__(self):
        return f"(-{self.x})"

    __hash__ = RealExpr.__hash__


@dataclass(frozen=True, eq=True)
class Add(RealExpr):
    x: RealExpr
    y: RealExpr

    def __str__(self):
        return f"({self.x} + {self.y})"

    __hash__ = RealExpr.__hash__


@dataclass(frozen=True, eq=True)
class Sub(RealExpr):
    x: RealExpr
    y: RealExpr

    def __str__(self):
        return f"({self.x} - {self.y})"

    __hash__ = RealExpr.__hash__


@dataclass(frozen=True, eq=True)
class Mul(RealExpr):
    x: RealExpr
    y: RealExpr

    def __str__(self):
        return f"{self.x}*{self.y}"

    __hash__ = RealExpr.__hash__


@dataclass(frozen=True, eq=True)
class Div(RealExpr):
    x: RealExpr
    y: RealExpr

    def __str__(self):
        return f"{self.x}/{self.y}"

    __hash__ = RealExpr.__hash__


@dataclass(frozen=True, eq=True)
class Root(RealExpr):
    """Real k-th root; for even k the radicand must be nonnegative."""

    k: int
    x: RealExpr

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 2:
            raise ValueError("root index must be an integer >= 2")

    def __str__(self):
        if self.k == 2:
            return f"sqrt({self.x})"
        return f"root({self.k}, {self.x})"

    __hash__ = RealExpr.__hash__


def const(v: Number) -> Const:
    return Const(Fraction(v))


def sqrt(x) -> Root:
    return Root(2, _wrap(x))


def root(k: int, x) -> Root:
    return Root(k, _wrap(x))


def power(e: RealExpr, k: int) -> RealExpr:
    """``e**k`` for k >= 0 as a product tree."""
    if k < 0:
        raise ValueError("negative exponent")
    if k == 0:
        return Const(Fraction(1))
    if k == 1:
        return e
    half = power(e, k // 2)
    sq = Mul(half, half)
    return Mul(sq, e) if k % 2 else sq


# ---------------------------------------------------------------------------
# interval evaluation: values are integers scaled by 2**-w


class _Straddle(Exception):
    pass


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@lru_cache(maxsize=8192)
def enclose(e: RealExpr, w: int) -> tuple[int, int]:
    """Integer pair ``(lo, hi)`` with ``lo/2**w <= value(e) <= hi/2**w``.

    Raises ``_Straddle`` when a divisor or even-root radicand enclosure
    contains zero at this working precision.
    """
    t = type(e)
    if t is Const:
        n, d = e.value.numerator, e.value.denominator
        return _floor_div(n << w, d), _ceil_div(n << w, d)
    if t is Neg:
        lo, hi = enclose(e.x, w)
        return -hi, -lo
    if t is Add:
        a, b = enclose(e.x, w), enclose(e.y, w)
        return a[0] + b[0], a[1] + b[1]
    if t is Sub:
        a, b = enclose(e.x, w), enclose(e.y, w)
        return a[0] - b[1], a[1] - b[0]
    if t is Mul:
        if e.x == e.y:
            lo, hi = enclose(e.x, w)
            if lo >= 0:
                p_lo, p_hi = lo * lo, hi * hi
            elif hi <= 0:
                p_lo, p_hi = hi * hi, lo * lo
            else:
                p_lo, p_hi = 0, max(lo * lo, hi * hi)
        else:
            a, b = enclose(e.x, w), enclose(e.y, w)
            ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
            p_lo, p_hi = min(ps), max(ps)
        return p_lo >> w, -((-p_hi) >> w)
    if t is Div:
        a, b = enclose(e.x, w), enclose(e.y, w)
        if b[0] <= 0 <= b[1]:
            raise _Straddle
        qs = [(x << w, y) for x in a for y in b]
        return min(_floor_div(n, d) for n, d in qs), max(_ceil_div(n, d) for n, d in qs)
    if t is Root:
        lo, hi = enclose(e.x, w)
        k = e.k
        shift = w * (k - 1)
        if k % 2 == 0:
            if hi < 0:
                raise ValueError("even root of a negative number")
            if lo < 0:
                raise _Straddle
            return iroot(lo << shift, k), _iroot_ceil(hi << shift, k)

        def up(v):
            return _iroot_ceil(v << shift, k) if v >= 0 else -iroot((-v) << shift, k)

        def down(v):
            return iroot(v << shift, k) if v >= 0 else -_iroot_ceil((-v) << shift, k)

        return down(lo), up(hi)
    raise TypeError(f"unknown node {t.__name__}")


def _work_cap(p: int, p_max: int) -> int:
    return max(4 * p_max, 2 * p + 64)


def ball_eval(e: RealExpr, p: int, p_max: int = P_MAX) -> Ball:
    """Ball of radius ``<= 2**-p`` containing the value of ``e``."""
    r = as_rational(e)
    if r is not None:
        return Ball(r)
    w = max(p + 16, 32)
    cap = _work_cap(p, p_max)
    while True:
        try:
            lo, hi = enclose(e, w)
        except _Straddle:
            if w >= cap:
                raise IndeterminateSign("indeterminate sign") from None
            w *= 2
            continue
        if hi - lo <= 1 << max(w + 1 - p, 0):
            return Ball(Fraction(lo + hi, 1 << (w + 1)), Fraction(hi - lo, 1 << (w + 1)))
        if w >= cap:
            raise PrecisionExhausted("precision exhausted")
        w *= 2


class Ordering(enum.Enum):
    LESS = "Less"
    GREATER = "Greater"
    EQUAL = "Equal"
    UNDECIDED = "Undecided"


def ball_compare(x, y, p_max: int = P_MAX) -> Ordering:
    """Certified comparison of two expressions.

    ``EQUAL`` is only returned when the difference normalizes to exactly zero,
    ``LESS``/``GREATER`` only for disjoint enclosures.
    """
    x, y = _wrap(x), _wrap(y)
    rx, ry = as_rational(x), as_rational(y)
    if rx is not None and ry is not None:
        return Ordering.LESS if rx < ry else Ordering.GREATER if rx > ry else Ordering.EQUAL
    if exprs_equal(x, y):
        return Ordering.EQUAL
    p = 64
    while p <= p_max:
        try:
            bx, by = ball_eval(x, p, p_max), ball_eval(y, p, p_max)
        except PrecisionExhausted:
            return Ordering.UNDECIDED
        if bx.hi < by.lo:
            return Ordering.LESS
        if by.hi < bx.lo:
            return Ordering.GREATER
        p *= 2
    return Ordering.UNDECIDED


# ---------------------------------------------------------------------------
# polynomial normal form over radical atoms
#
# A normal form is a dict {monomial: Fraction}; a monomial is a sorted tuple of
# (atom, exponent) pairs.  Atoms are ("root", k, m) with integer m > 1 not a
# perfect k-th power (relation atom**k == m), ("rootx", k, nf) for radicands
# that are not rational (relation atom**k == nf), or ("inv", nf) for a
# reciprocal of a non-monomial form (no relation).

_MAX_TERMS = 512
_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % r for r in range(2, isqrt(p) + 1))]


class _NoForm(Exception):
    pass


def _nf_key(nf: dict) -> tuple:
    return tuple(sorted(nf.items(), key=lambda kv: repr(kv[0])))


def _nf_add(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _nf_scale(a: dict, c: Fraction) -> dict:
    return {m: v * c for m, v in a.items()} if c else {}


def _atom_power(atom, e: int) -> dict:
    """Normal form of ``atom**e`` after applying the atom's relation."""
    kind = atom[0]
    if kind == "root":
        _, k, m = atom
        q, r = divmod(e, k)
        mono = ((atom, r),) if r else ()
        return {mono: Fraction(m) ** q}
    if kind == "rootx":
        _, k, key = atom
        q, r = divmod(e, k)
        base = {((atom, r),) if r else (): Fraction(1)}
        rad = dict(key)
        for _ in range(q):
            base = _nf_mul(base, rad)
        return base
    return {((atom, e),): Fraction(1)}


def _nf_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            exps: dict = {}
            for atom, e in ma + mb:
                exps[atom] = exps.get(atom, 0) + e
            red = [at for at, e in exps.items() if at[0] != "inv" and e >= at[1]]
            keep = tuple(sorted(((at, e) for at, e in exps.items() if at not in red), key=_mono_order))
            term = {keep: ca * cb}
            for atom in red:
                term = _nf_mul(term, _atom_power(atom, exps[atom]))
            out = _nf_add(out, term)
            if len(out) > _MAX_TERMS:
                raise _NoForm
    return out


def _mono_order(item):
    return repr(item[0])


def _rational_root(r: Fraction, k: int) -> dict:
    if r == 0:
        return {}
    sign = 1
    if r < 0:
        if k % 2 == 0:
            raise _NoForm
        sign, r = -1, -r
    n, d = r.numerator, r.denominator
    m = n * d ** (k - 1)
    coef = Fraction(sign, d)
    for p in _SMALL_PRIMES:
        pk = p ** k
        if pk > m:
            break
        while m % pk == 0:
            m //= pk
            coef *= p
    t = iroot(m, k)
    if t ** k == m:
        return {(): coef * t}
    return {((("root", k, m), 1),): coef}


@lru_cache(maxsize=4096)
def _normal_form_cached(e: RealExpr) -> tuple:
    return _nf_key(_normal_form(e))


def _normal_form(e: RealExpr) -> dict:
    t = type(e)
    if t is Const:
        return {(): e.value} if e.value else {}
    if t is Neg:
        return _nf_scale(dict(_normal_form_cached(e.x)), Fraction(-1))
    if t is Add:
        return _nf_add(dict(_normal_form_cached(e.x)), dict(_normal_form_cached(e.y)))
    if t is Sub:
        return _nf_add(dict(_normal_form_cached(e.x)), dict(_normal_form_cached(e.y)), -1)
    if t is Mul:
        return _nf_mul(dict(_normal_form_cached(e.x)), dict(_normal_form_cached(e.y)))
    if t is Div:
        num = dict(_normal_form_cached(e.x))
        den = dict(_normal_form_cached(e.y))
        if not den:
            raise _NoForm
        if len(den) == 1:
            (mono, c), = den.items()
            if all(atom[0] == "root" for atom, _ in mono):
                # 1/atom**e == atom**(k-e) / m
                inv = {(): 1 / c}
                for atom, ex in mono:
                    _, k, m = atom
                    inv = _nf_mul(inv, {((atom, k - ex),): Fraction(1, m)})
                return _nf_mul(num, inv)
        atom = ("inv", _nf_key(den))
        return _nf_mul(num, {((atom, 1),): Fraction(1)})
    if t is Root:
        rad = dict(_normal_form_cached(e.x))
        if not rad:
            return {}
        if set(rad) == {()}:
            return _rational_root(rad[()], e.k)
        if e.k % 2 == 0 and _provably_negative(e.x):
            raise _NoForm
        return {((("rootx", e.k, _nf_key(rad)), 1),): Fraction(1)}
    raise _NoForm


def _provably_negative(e: RealExpr) -> bool:
    try:
        lo, hi = enclose(e, 64)
    except _Straddle:
        return False
    return hi < 0


def _normal_form_or_none(e: RealExpr) -> Optional[dict]:
    try:
        return dict(_normal_form_cached(e))
    except (_NoForm, ZeroDivisionError, RecursionError):
        return None


def as_rational(e) -> Optional[Fraction]:
    """Exact rational value if the tree simplifies syntactically, else None.

    ``None`` does not certify irrationality.
    """
    if isinstance(e, (int, Fraction)):
        return Fraction(e)
    if type(e) is Const:
        return e.value
    nf = _normal_form_or_none(e)
    if nf is None:
        return None
    if not nf:
        return Fraction(0)
    if set(nf) == {()}:
        return nf[()]
    return None


def exprs_equal(x, y) -> bool:
    """True when ``x - y`` normalizes to zero (a proof of equality)."""
    nf = _normal_form_or_none(Sub(_wrap(x), _wrap(y)))
    return nf is not None and not nf


# ---------------------------------------------------------------------------
# parser
#   expr   := term (('+'|'-') term)*
#   term   := factor (('*'|'/') factor)*
#   factor := INT | INT '/' INT | 'sqrt(' expr ')' | 'root(' INT ',' expr ')'
#           | '(' expr ')' | '-' factor

_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt|root)|(.))")


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        if m.group(1) is not None:
            toks.append(("INT", int(m.group(1))))
        elif m.group(2) is not None:
            toks.append(("FN", m.group(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*/(),":
                raise ExpressionSyntaxError(f"unexpected character {ch!r} in {text!r}")
            toks.append((ch, ch))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind):
        if self.peek() != kind:
            got = self.toks[self.i][1] if self.i < len(self.toks) else "end of input"
            raise ExpressionSyntaxError(f"expected {kind!r}, got {got!r} in {self.text!r}")
        tok = self.toks[self.i]
        self.i += 1
        return tok[1]

    def expr(self):
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.take(self.peek())
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take(self.peek())
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self):
        kind = self.peek()
        if kind == "INT":
            return Const(Fraction(self.take("INT")))
        if kind == "-":
            self.take("-")
            return Neg(self.factor())
        if kind == "(":
            self.take("(")
            node = self.expr()
            self.take(")")
            return node
        if kind == "FN":
            name = self.take("FN")
            self.take("(")
            if name == "sqrt":
                node = Root(2, self.expr())
            else:
                k = self.take("INT")
                self.take(",")
                if k < 2:
                    raise ExpressionSyntaxError("root index must be >= 2")
                node = Root(k, self.expr())
            self.take(")")
            return node
        got = self.toks[self.i][1] if self.i < len(self.toks) else "end of input"
        raise ExpressionSyntaxError(f"unexpected {got!r} in {self.text!r}")


def parse_expr(text: str) -> RealExpr:
    p = _Parser(text)
    if not p.toks:
        raise ExpressionSyntaxError("empty expression")
    node = p.expr()
    if p.i != len(p.toks):
        raise ExpressionSyntaxError(f"trailing input in {text!r}")
    return node


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_expr_list(text: str) -> list[RealExpr]:
    """Parse comma-separated expressions (commas inside ``root(k, x)`` are kept)."""
    return [parse_expr(part) for part in _split_top_level(text)]


def fraction_to_decimal(x: Fraction, digits: int = 20, up: bool = False) -> str:
    """Decimal string for ``x`` rounded down (or up) to ``digits`` significant digits."""
    from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal

    ctx = Context(prec=digits, rounding=ROUND_CEILING if up else ROUND_FLOOR)
    v = ctx.divide(Decimal(x.numerator), Decimal(x.denominator))
    return format(v, "E") if v and (abs(v.adjusted()) > 6) else format(v, "f")


def _gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g
