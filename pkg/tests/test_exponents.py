from fractions import Fraction
from math import ceil

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diophapprox.best_approx import Target, lift_square, scan
from diophapprox.exact import Ball
from diophapprox.exponents import (
    CONSISTENT,
    VIOLATED,
    ExponentReport,
    check_bounds,
    estimate_ordinary,
    estimate_uniform,
    exponent_report,
    log_bounds,
)

from oracles import cf_record_qs, mp_value


def _mp(x):
    return mpmath.mpf(x.numerator) / x.denominator


def _oracle_estimates(text, pdq, qmax, tail=Fraction(1, 2)):
    """Both estimators from continued-fraction denominators and mpmath distances."""
    with mpmath.workdps(60):
        theta = mp_value(text)
        qs = cf_record_qs(*pdq, qmax)
        zs = [abs(q * theta - mpmath.nint(q * theta)) for q in qs]
        n = len(qs)
        k = max(1, ceil(n * tail))
        idx = range(n - k, n)
        ordinary = max(mpmath.log(1 / zs[i]) / mpmath.log(qs[i]) for i in idx if qs[i] >= 2)
        uniform = min(mpmath.log(1 / zs[i - 1]) / mpmath.log(qs[i]) for i in idx if i >= 1)
        return ordinary, uniform


@given(st.fractions(min_value=Fraction(1, 10 ** 30), max_value=10 ** 30))
@settings(max_examples=200)
def test_log_bounds_enclose(x):
    lo, hi = log_bounds(x)
    with mpmath.workdps(60):
        v = mpmath.log(_mp(x))
        assert _mp(lo) <= v <= _mp(hi)
    assert hi - lo < Fraction(1, 2 ** 55) * max(1, abs(lo))


@pytest.mark.parametrize("text, pdq", [("(1+sqrt(5))/2", (1, 5, 2)), ("sqrt(2)", (0, 2, 1)),
                                       ("sqrt(3)", (0, 3, 1)), ("sqrt(7)", (0, 7, 1))])
@pytest.mark.parametrize("qmax", [100, 10 ** 5])
def test_estimates_match_oracle(text, pdq, qmax):
    recs = scan(Target.parse(text), qmax)
    o, u = _oracle_estimates(text, pdq, qmax)
    with mpmath.workdps(60):
        b = estimate_ordinary(recs)
        assert _mp(b.lo) <= o <= _mp(b.hi)
        b = estimate_uniform(recs)
        assert _mp(b.lo) <= u <= _mp(b.hi)


def test_frozen_values():
    # regression values from the oracle-checked runs above
    recs = scan(Target.parse("(1+sqrt(5))/2"), 10 ** 5)
    assert abs(float(estimate_ordinary(recs).center) - 1.1356519054689680) < 1e-12
    recs = scan(Target.parse("sqrt(2)"), 10 ** 5)
    assert abs(float(estimate_uniform(recs).center) - 1.0140136334746603) < 1e-12


def test_two_record_golden_ratio():
    recs = scan(Target.parse("(1+sqrt(5))/2"), 2)
    assert [r.q for r in recs] == [1, 2]
    # zeta at q = 1 is 2 - phi (the nearest integer to phi is 2)
    with mpmath.workdps(50):
        phi = (1 + mpmath.sqrt(5)) / 2
        v = mpmath.log(1 / (2 - phi)) / mpmath.log(2)
        b = estimate_uniform(recs)
        assert _mp(b.lo) <= v <= _mp(b.hi)
    assert abs(float(b.center) - 1.3884838272612) < 1e-12


def test_single_record_rejected():
    recs = scan(Target.parse("sqrt(2)"), 1)
    with pytest.raises(ValueError):
        estimate_ordinary(recs)
    with pytest.raises(ValueError):
        estimate_uniform(recs)


def test_ordinary_at_least_uniform():
    for text in ["sqrt(2)", "root(3,2), root(3,4)", "sqrt(1/2), sqrt(1/3), sqrt(1/6)"]:
        recs = scan(Target.parse(text), 20000)
        r = exponent_report(recs, len(text.split(",")), 20000)
        assert r.omega_est.hi >= r.omega_hat_est.lo - 2 * (r.omega_est.radius + r.omega_hat_est.radius)


@settings(max_examples=10, deadline=None)
@given(st.integers(50, 3000), st.sampled_from(["sqrt(3)", "root(3,2), root(3,4)"]))
def test_uniform_running_min_monotone(q1, text):
    # extending the scan can only lower the min over a fixed window of pairs
    recs = scan(Target.parse(text), 20000)
    short = [r for r in recs if r.q <= q1]
    if len(short) < 2:
        return
    full = estimate_uniform(recs, tail_fraction=1)
    part = estimate_uniform(short, tail_fraction=1)
    assert full.lo <= part.hi


def test_report_table_uses_same_enclosures():
    recs = scan(Target.parse("root(3,2), root(3,4)"), 10 ** 4)
    rep = exponent_report(recs, 2, 10 ** 4)
    assert [row[1] for row in rep.per_nu] == [r.q for r in recs]
    assert all(row[2] is r.zeta for row, r in zip(rep.per_nu, recs))
    assert rep.per_nu[0][4] is None


def _rep(w, wh, m=1):
    return ExponentReport(m, 100, Ball(Fraction(w)), Ball(Fraction(wh)))


def test_check_bounds_examples():
    v = {x.bound: x for x in check_bounds(_rep("1.01", "1.01"), {"m": 1}, Fraction(1, 20))}
    assert v["omega_hat <= 1"].status == CONSISTENT
    v = {x.bound: x for x in check_bounds(_rep("0.7", "0.60", 2), {"m": 2, "lift": "poly", "d": 1, "s": 2})}
    assert v["omega_hat <= H_{1,2}"].status == CONSISTENT
    assert v["omega_hat <= H_{1,2}"].margin > 0
    v = {x.bound: x for x in check_bounds(_rep("0.4", "0.5", 2), {"m": 2})}
    assert v["omega >= omega_hat"].status == VIOLATED


def test_check_bounds_variety_and_errors():
    v = {x.bound: x for x in check_bounds(_rep("1.3", "0.9", 2), {"m": 2, "lift": "variety", "d": 2, "s": 2},
                                          Fraction(1, 20))}
    assert v["omega <= 1"].status == VIOLATED
    assert v["omega_hat <= H_{1,2}"].status == VIOLATED
    with pytest.raises(ValueError):
        check_bounds(_rep(1, 1), {"lift": "square"})
    with pytest.raises(ValueError):
        check_bounds(_rep(1, 1), {"m": 1, "lift": "square"})


def test_lifted_cube_root_below_H1():
    recs = scan(lift_square(["root(3,2)"]), 10 ** 4)
    rep = exponent_report(recs, 2, 10 ** 4)
    v = {x.bound: x for x in check_bounds(rep, {"m": 2, "lift": "square", "d": 1, "s": 2})}
    assert v["omega_hat <= H_1"].status == CONSISTENT
