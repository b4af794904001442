"""
Best approximation vectors and exponent estimates
=================================================

Record denominators of a few targets and the finite-scale estimates of the
ordinary and uniform exponents, with bound verdicts.
"""

import time

from diophapprox.best_approx import Target, lift_square, scan
from diophapprox.exponents import check_bounds, exponent_report

QMAX = 10 ** 6

# one-dimensional quadratic irrationals: both exponents should be near 1
for text in ["(1+sqrt(5))/2", "sqrt(2)", "sqrt(3)", "sqrt(5)", "sqrt(7)"]:
    t0 = time.perf_counter()
    recs = scan(Target.parse(text), QMAX)
    rep = exponent_report(recs, 1, QMAX)
    print(f"{text:>14}: {len(recs):3d} records  omega {float(rep.omega_est.center):.4f}"
          f"  omega_hat {float(rep.omega_hat_est.center):.4f}  ({time.perf_counter() - t0:.2f}s)")

print()
print("first records of sqrt(2):", [r.q for r in scan(Target.parse("sqrt(2)"), 1000)])

# (cbrt 2, cbrt 4) is the lift of cbrt 2 to the parabola y = x^2
print()
recs = scan(lift_square(["root(3,2)"]), 10 ** 5)
rep = exponent_report(recs, 2, 10 ** 5)
print(f"(cbrt 2, cbrt 4): {len(recs)} records, omega {float(rep.omega_est.center):.4f},"
      f" omega_hat {float(rep.omega_hat_est.center):.4f}")
for v in check_bounds(rep, {"m": 2, "lift": "square", "d": 1, "s": 2}):
    print(f"  {v.bound:<28} {v.status:<26} margin {float(v.margin):+.4f}")

# per-record table
print()
print(" nu        q   log(1/zeta)/log q")
for nu, q, zeta, ratio, _ in rep.per_nu:
    if ratio is not None:
        print(f"{nu:3d} {q:8d}   {float(ratio.center):.4f}")
