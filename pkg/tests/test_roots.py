from fractions import Fraction

import mpmath
import pytest

from diophapprox.roots import G_poly, H_poly, Hds_poly, closed_form_d1, solve_G, solve_H, solve_Hds

EPS = Fraction(1, 2 ** 50)


def _mp_root(coefs, lo, hi):
    with mpmath.workdps(60):
        return mpmath.findroot(lambda x: mpmath.polyval(list(reversed(coefs)), x), (lo, hi), solver="anderson")


def _contains(res, x):
    with mpmath.workdps(60):
        return mpmath.mpf(res.lo.numerator) / res.lo.denominator <= x <= mpmath.mpf(res.hi.numerator) / res.hi.denominator


def test_golden_section():
    r = solve_H(1)
    assert r.hi - r.lo <= Fraction(1, 2 ** 63)
    assert abs(float(r.value.center) - 0.6180339887498949) < 1e-15


@pytest.mark.parametrize("d", range(1, 9))
def test_H_against_mpmath(d):
    r = solve_H(d)
    assert _contains(r, _mp_root(H_poly(d), 0.5, 1))
    assert Fraction(1, 2) < r.lo and r.hi < 1


def test_H2_value():
    # x^3 + x^2 + x = 1
    assert abs(float(solve_H(2).value.center) - 0.5436890126920764) < 1e-15


@pytest.mark.parametrize("s", range(2, 11))
def test_Hds_closed_form(s):
    r = solve_Hds(1, s)
    cf = closed_form_d1(s)
    assert abs(r.value.center - cf.center) <= EPS


@pytest.mark.parametrize("d", range(1, 9))
def test_Hds_s2_is_H(d):
    assert abs(solve_Hds(d, 2).value.center - solve_H(d).value.center) <= EPS


@pytest.mark.parametrize("s", [2, 3, 5, 10])
def test_Hds_bounds_and_monotone(s):
    vals = [solve_Hds(d, s) for d in range(1, 9)]
    for r in vals:
        assert Fraction(s - 1, s) < r.lo and r.hi < 1
    for a, b in zip(vals, vals[1:]):
        assert b.hi < a.lo


def test_Hds_poly_shape():
    # s = 3, d = 2: 4(x - 1) + 2 x^2 + x^3
    assert Hds_poly(2, 3) == (-4, 4, 2, 1)


def test_G_examples():
    assert solve_G(2, Fraction(1, 2)).value.contains(1)
    assert solve_G(2, Fraction(2, 3)).value.contains(2)
    with mpmath.workdps(60):
        phi = (1 + mpmath.sqrt(5)) / 2
    assert _contains(solve_G(3, Fraction(1, 2)), phi)
    assert G_poly(3, Fraction(1, 3)) == (-1, -1, 2)


def test_G_m2_is_jarnik_ratio():
    # m = 2: G = w / (1 - w)
    for w in [Fraction(1, 3), Fraction(3, 5), Fraction(7, 10)]:
        assert solve_G(2, w).value.contains(w / (1 - w))


def test_errors():
    with pytest.raises(ValueError):
        solve_H(0)
    with pytest.raises(ValueError):
        solve_Hds(1, 1)
    with pytest.raises(ValueError):
        solve_G(1, Fraction(1, 2))
    with pytest.raises(ValueError):
        solve_G(3, Fraction(1))
