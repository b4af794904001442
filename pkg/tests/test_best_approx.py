from fractions import Fraction
from math import gcd

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diophapprox.best_approx import (
    RationalTargetError,
    Target,
    distance,
    lift_poly,
    lift_square,
    records_from_csv,
    records_to_csv,
    scan,
)
from diophapprox.exact import as_rational, ball_eval
from diophapprox.polynomial import parse_poly, sphere

from oracles import brute_records, cf_record_qs, mp_value

QUADRATIC = [
    ("(1+sqrt(5))/2", (1, 5, 2)),
    ("sqrt(2)", (0, 2, 1)),
    ("sqrt(3)", (0, 3, 1)),
    ("sqrt(7)", (0, 7, 1)),
    ("(2+sqrt(13))/3", (2, 13, 3)),
    ("sqrt(1/2)", (0, 2, 2)),
]


def _mp(b):
    return mpmath.mpf(b.numerator) / b.denominator


def test_distance_examples():
    t = Target.parse("sqrt(2)")
    a, z = distance(t, 1)
    assert a == (1,) and z.radius <= Fraction(1, 2 ** 64)
    with mpmath.workdps(50):
        assert _mp(z.lo) <= mpmath.sqrt(2) - 1 <= _mp(z.hi)
    a, z = distance(t, 2)
    assert a == (3,)
    with mpmath.workdps(50):
        assert _mp(z.lo) <= 3 - 2 * mpmath.sqrt(2) <= _mp(z.hi)


def test_distance_integer_coordinate_contributes_zero():
    a, z = distance(Target.parse("1/2, sqrt(2)"), 2)
    assert a[0] == 1
    _, z_alone = distance(Target.parse("sqrt(2)"), 2)
    assert z == z_alone


def test_distance_half_integer_takes_smaller():
    a, z = distance(Target.parse("1/2"), 1)
    assert a == (0,) and z.center == Fraction(1, 2)
    a, _ = distance(Target.parse("3/2"), 1)
    assert a == (1,)


@pytest.mark.parametrize("text, pdq", QUADRATIC)
def test_scan_matches_continued_fractions(text, pdq):
    qmax = 10 ** 5
    got = [r.q for r in scan(Target.parse(text), qmax)]
    assert got == cf_record_qs(*pdq, qmax)


def test_scan_examples():
    assert [r.q for r in scan(Target.parse("(1+sqrt(5))/2"), 100)] == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]
    assert [r.q for r in scan(Target.parse("sqrt(2)"), 100)] == [1, 2, 5, 12, 29, 70]
    assert [r.q for r in scan(Target.parse("root(3, 5)"), 1)] == [1]


@pytest.mark.parametrize("texts", [("root(3,2)", "root(3,4)"), ("sqrt(2)", "sqrt(3)"),
                                   ("sqrt(1/2)", "sqrt(1/3)", "sqrt(1/6)")])
def test_scan_matches_brute_force(texts):
    qmax = 1500
    with mpmath.workdps(60):
        thetas = [mp_value(t) for t in texts]
        oracle = brute_records(thetas, qmax)
    got = scan(Target.parse(", ".join(texts)), qmax)
    assert [(r.q, r.a) for r in got] == [(q, a) for q, a, _ in oracle]
    with mpmath.workdps(60):
        for r, (_, _, z) in zip(got, oracle):
            assert _mp(r.zeta.lo) <= z <= _mp(r.zeta.hi)


@pytest.mark.parametrize("text", ["(1+sqrt(5))/2", "root(3,2), root(3,3)", "sqrt(1/2), sqrt(1/2)"])
def test_record_invariants(text):
    recs = scan(Target.parse(text), 20000)
    for r in recs:
        assert gcd(r.q, *r.a) == 1
        assert r.zeta.radius <= Fraction(1, 2 ** 64)
    for x, y in zip(recs, recs[1:]):
        assert x.q < y.q
        assert y.zeta.hi < x.zeta.lo
        assert y.index == x.index + 1


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 5000), st.integers(1, 8), st.sampled_from(["sqrt(3)", "root(3,2), sqrt(5)", "(1+sqrt(5))/2"]))
def test_chunking_and_threads_do_not_change_output(chunk, threads, text):
    t = Target.parse(text)
    assert scan(t, 20000, threads=threads, chunk=chunk) == scan(t, 20000)


def test_rational_targets_rejected():
    with pytest.raises(RationalTargetError, match="rational target"):
        scan(lift_square(["sqrt(2)"]), 10)
    with pytest.raises(RationalTargetError):
        scan(Target.parse("sqrt(2), sqrt(3)", irrationality_asserted=False), 10)
    with pytest.raises(RationalTargetError):
        scan(lift_square(["sqrt(2)", "sqrt(3)"]), 10)


def test_lift_square():
    t = lift_square(["sqrt(2)"])
    assert as_rational(t.coordinates[1]) == 2
    t = lift_square(["root(3,2)"])
    b = ball_eval(t.coordinates[1], 200)
    with mpmath.workdps(80):
        v = mpmath.cbrt(4)
        assert _mp(b.lo) <= v <= _mp(b.hi)


def test_lift_poly():
    assert as_rational(lift_poly(sphere(2), ["sqrt(1/2)", "sqrt(1/2)"]).coordinates[2]) == 1
    cube = parse_poly("1 3\n3 1\n")
    assert as_rational(lift_poly(cube, ["root(3,2)"]).coordinates[1]) == 2
    pell = parse_poly("2 2\n2 0 1\n0 2 -2\n")
    assert as_rational(lift_poly(pell, ["sqrt(3)", "sqrt(2)"]).coordinates[2]) == -1
    with pytest.raises(ValueError, match="dimension mismatch"):
        lift_poly(pell, ["sqrt(3)"])


def test_csv_round_trip():
    recs = scan(Target.parse("root(3,2), root(3,4)"), 5000)
    text = records_to_csv(recs, 2)
    assert text.splitlines()[0] == "nu,q,a_1,a_2,zeta_lo,zeta_hi"
    back = records_from_csv(text)
    assert [(r.index, r.q, r.a) for r in back] == [(r.index, r.q, r.a) for r in recs]
    for r, b in zip(recs, back):
        assert b.zeta.contains(r.zeta)
        assert b.zeta.radius < r.zeta.center * Fraction(1, 10 ** 18)
