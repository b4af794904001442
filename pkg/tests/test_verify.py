from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diophapprox.best_approx import BestApproxRecord, Target, lift_poly, lift_square, scan
from diophapprox.exact import Ball, parse_expr_list
from diophapprox.polynomial import parse_poly, sphere
from diophapprox.variety import PsiBreakpoint, RationalPoint, psi_breakpoints, sphere_points
from diophapprox.verify import (
    Outcome,
    PreconditionError,
    VerificationReport,
    case2_diagnostic,
    check_breakpoints,
    check_lemma2,
    check_simplex_i,
    check_simplex_ii,
    exhaustive_simplex,
    simplex_ratio,
)

S2 = sphere(2)
A = RationalPoint(5, (3, 4))
B = RationalPoint(5, (4, 3))
E2 = RationalPoint(1, (0, 1))
SQUARE = parse_poly("1 2\n2 1\n")


def _invariant(rep):
    assert rep.checked == rep.passed + rep.skipped + len(rep.failures)


def test_simplex_examples():
    assert check_simplex_i(S2, A, E2) is Outcome.PASS
    assert check_simplex_ii(S2, A, E2) is Outcome.PASS
    assert simplex_ratio(S2, A, E2, "i") == (Outcome.PASS, 2)
    assert simplex_ratio(S2, A, B, "i") == (Outcome.PASS, 10)
    assert simplex_ratio(S2, A, B, "ii") == (Outcome.PASS, 2)


def test_simplex_skipped_and_precondition():
    assert check_simplex_i(S2, A, A) is Outcome.SKIPPED
    assert check_simplex_ii(S2, A, RationalPoint(10, (6, 8))) is Outcome.SKIPPED
    with pytest.raises(PreconditionError, match="not of the form"):
        check_simplex_i(S2, RationalPoint(3, (1, 1)), A)
    with pytest.raises(PreconditionError):
        check_simplex_ii(S2, A, RationalPoint(3, (1, 1)))


def test_odd_degree_compares_squares():
    cube = parse_poly("2 3\n3 0 1\n0 3 1\n")
    # N = (1, -1) lies on x^3 + y^3 = 0
    assert simplex_ratio(cube, RationalPoint(1, (1, 0)), RationalPoint(1, (0, 1)))[0] is Outcome.SKIPPED
    # N = (2, 0): D K |N|^3 = 2 * 8 >= 1 is compared as 4 * 64 >= 1
    assert simplex_ratio(cube, RationalPoint(1, (1, 0)), RationalPoint(1, (-1, 0)), "ii") == (Outcome.PASS, 256)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sphere_points(3, 12)), st.sampled_from(sphere_points(3, 12)))
def test_simplex_ratio_matches_rational_definition(alpha, beta):
    f = sphere(3)
    out, ratio = simplex_ratio(f, alpha, beta, "ii")
    diff = [x - y for x, y in zip(alpha.alpha, beta.alpha)]
    n2 = sum(v * v for v in diff)
    if n2 == 0:
        assert out is Outcome.SKIPPED
        return
    assert ratio == n2 * alpha.q * beta.q
    assert (out is Outcome.PASS) == (ratio >= 1)


@pytest.mark.parametrize("d, tmax, size", [(2, 100, 132), (3, 25, None)])
def test_exhaustive_sphere(d, tmax, size):
    rep = exhaustive_simplex(sphere(d), tmax)
    _invariant(rep)
    assert rep.failures == [] and rep.skipped == 0
    n = rep.extra["corpus_size"]
    if size:
        assert n == size
    assert rep.checked == n * (n - 1) // 2
    assert rep.extremal_margin == 2


def test_exhaustive_margin_matches_pure_python():
    f = sphere(2)
    pts = [p for p in sphere_points(2, 30) if p.is_primitive]
    rep = exhaustive_simplex(f, 30)
    best = min(simplex_ratio(f, x, y)[1] for i, x in enumerate(pts) for y in pts[i + 1:])
    assert rep.extremal_margin == best


def test_exhaustive_small_corpora():
    rep = exhaustive_simplex(S2, 1, corpus=[E2])
    assert (rep.checked, rep.extremal_margin) == (0, None)
    with pytest.raises(ValueError, match="empty corpus"):
        exhaustive_simplex(S2, 1, corpus=[])


def test_exhaustive_big_integer_fallback():
    # large denominators push the integer form past int64
    pts = [RationalPoint(q * q + 1, (q * q - 1, 2 * q)) for q in (10 ** 5, 10 ** 5 + 1, 3 * 10 ** 5)]
    rep = exhaustive_simplex(S2, 10 ** 12, corpus=pts)
    assert rep.checked == 3 and rep.failures == []
    assert rep.extremal_margin == min(simplex_ratio(S2, x, y)[1] for i, x in enumerate(pts) for y in pts[i + 1:])


def test_divisibility_on_lifts():
    rep = check_lemma2(SQUARE, scan(lift_square(["root(3,2)"]), 10 ** 4))
    _invariant(rep)
    assert rep.failures == []
    assert sum(rep.extra[k] for k in ("case_1_1", "case_1_2", "case_2")) == rep.checked - 1


def test_divisibility_synthetic_on_level_records():
    z = Ball(Fraction(1, 100))
    recs = [BestApproxRecord(1, 4, (2, 1), z), BestApproxRecord(2, 9, (3, 1), z), BestApproxRecord(3, 9, (5, 3), z)]
    rep = check_lemma2(SQUARE, recs)
    _invariant(rep)
    assert (rep.passed, rep.skipped) == (2, 1)
    assert rep.extra["max_delta"] == 3
    assert rep.extra["first_record_on_level"] == 1
    assert rep.extra["case_1_2"] == 1 and rep.extra["case_2"] == 1 and rep.extra["case_1_1"] == 0


def test_divisibility_shape_errors():
    z = Ball(Fraction(1, 100))
    with pytest.raises(ValueError, match="coordinates"):
        check_lemma2(SQUARE, [BestApproxRecord(1, 2, (1,), z)])
    with pytest.raises(ValueError, match="not primitive"):
        check_lemma2(SQUARE, [BestApproxRecord(1, 2, (2, 2), z)])


def test_breakpoints_sphere():
    bps = psi_breakpoints(S2, parse_expr_list("sqrt(1/2), sqrt(1/2)"), 10 ** 4)
    rep = check_breakpoints(S2, bps, tmax=10 ** 4)
    _invariant(rep)
    assert rep.failures == [] and rep.skipped == 0 and rep.checked == len(bps) - 1
    assert rep.extra["bound"] == Fraction(1, 4)
    assert rep.extremal_margin > 1
    assert check_breakpoints(S2, bps[:1]).checked == 0


def test_breakpoints_synthetic_failure_reverifies():
    bps = [PsiBreakpoint(1, RationalPoint(1, (1, 0)), Ball(Fraction(1, 10 ** 6))),
           PsiBreakpoint(5, RationalPoint(5, (3, 4)), Ball(Fraction(1, 10 ** 7)))]
    rep = check_breakpoints(S2, bps)
    _invariant(rep)
    (w,) = rep.failures
    assert w["psi_hi"] * w["q"] < w["bound"]


def test_case2_sphere_and_lift():
    t = Target.parse("sqrt(1/2), sqrt(1/2)")
    rep, rows = case2_diagnostic(S2, scan(t, 10 ** 4))
    _invariant(rep)
    assert rep.failures == [] and rep.passed == len(rows)
    for r in rows:
        assert r["abs_diff"] >= r["floor"]
    rep, rows = case2_diagnostic(SQUARE, scan(lift_square(["root(3,2)"]), 10 ** 4))
    assert rep.failures == [] and all(r["q_pow_s_minus_1_zeta"].lo > 0 for r in rows)


def test_case2_excludes_points_on_the_curve():
    z = Ball(Fraction(1, 100))
    rep, rows = case2_diagnostic(S2, [BestApproxRecord(1, 5, (3, 4), z), BestApproxRecord(2, 7, (5, 5), z)])
    assert rep.skipped == 1 and [r["q"] for r in rows] == [7]
    assert rows[0]["abs_diff"] == Fraction(1, 49)
    with pytest.raises(ValueError):
        case2_diagnostic(S2, [BestApproxRecord(1, 5, (3,), z)])


def test_divisibility_with_poly_lift():
    f = parse_poly("2 2\n2 0 1\n0 2 1\n")
    recs = scan(lift_poly(f, ["root(3,2)", "root(3,3)"]), 1000)
    rep = check_lemma2(f, recs)
    _invariant(rep)
    assert rep.failures == []


def test_report_add():
    rep = VerificationReport()
    rep.add(Outcome.PASS, Fraction(3))
    rep.add(Outcome.SKIPPED)
    rep.add(Outcome.FAIL, Fraction(1, 2), {"x": 1})
    _invariant(rep)
    assert not rep.ok and rep.extremal_margin == Fraction(1, 2)
