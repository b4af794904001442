"""
Exact checks
============

The simplex bound on every pair of sphere points, the gcd divisibility on
lifted targets, and the |f(alpha) - 1| >= 1/(D q^s) witnesses.
"""

import time

from diophapprox.best_approx import Target, lift_poly, lift_square, scan
from diophapprox.polynomial import parse_poly, sphere
from diophapprox.verify import case2_diagnostic, check_lemma2, exhaustive_simplex

for d, tmax in [(2, 100), (3, 40)]:
    t0 = time.perf_counter()
    rep = exhaustive_simplex(sphere(d), tmax)
    print(f"sphere:{d} tmax {tmax}: {rep.extra['corpus_size']} points, {rep.checked} pairs,"
          f" {len(rep.failures)} failures, smallest ratio {rep.extremal_margin}"
          f" ({time.perf_counter() - t0:.2f}s)")

print()
square = parse_poly("1 2\n2 1\n")
for name, f, recs in [
    ("x^2, cbrt 2", square, scan(lift_square(["root(3,2)"]), 10 ** 4)),
    ("x^2 + y^2, (cbrt 2, cbrt 3)", sphere(2), scan(lift_poly(sphere(2), ["root(3,2)", "root(3,3)"]), 10 ** 3)),
]:
    rep = check_lemma2(f, recs)
    print(f"{name}: {rep.checked} records, divisibility checked on {rep.passed}, failures {len(rep.failures)}")
    print("   cases:", {k: v for k, v in rep.extra.items() if k != "max_delta"})

print()
rep, rows = case2_diagnostic(sphere(2), scan(Target.parse("sqrt(1/2), sqrt(1/2)"), 10 ** 4))
print(f"circle records off the curve: {rep.passed} witnesses, {len(rep.failures)} failures")
print("   q      |f - 1| * q^2   q * zeta")
for r in rows:
    print(f"{r['q']:6d}   {float(r['abs_diff'] * r['q'] ** 2):8.3f}   {float(r['q_pow_s_minus_1_zeta'].center):.4f}")
