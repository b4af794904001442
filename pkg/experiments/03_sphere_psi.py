"""
Intrinsic approximation on spheres
==================================

Breakpoints of Psi(T) = min |q xi - a|^2 / q over rational points a/q on the
sphere, the chain T * Psi(T) >= 1/4, and points found by stereographic
projection.
"""

from diophapprox.exact import parse_expr_list
from diophapprox.polynomial import sphere
from diophapprox.variety import intrinsic_uniform_exponent, point_near, psi_breakpoints, sphere_points
from diophapprox.verify import check_breakpoints

print("primitive points on the circle with q <= 25:",
      sum(p.is_primitive for p in sphere_points(2, 25)))

for d, text, tmax in [(2, "sqrt(1/2), sqrt(1/2)", 10 ** 4), (3, "sqrt(1/2), sqrt(1/3), sqrt(1/6)", 10 ** 3)]:
    xi = parse_expr_list(text)
    bps = psi_breakpoints(sphere(d), xi, tmax)
    print()
    print(f"xi = ({text}) on sphere:{d}, T <= {tmax}")
    print("       q  point                     Psi(q)        (next q - 1) * Psi")
    for i, b in enumerate(bps):
        T = bps[i + 1].q - 1 if i + 1 < len(bps) else tmax
        print(f"{b.q:8d}  {str(b.point.a):<24}  {float(b.psi.center):.6e}  {float(T * b.psi.center):.4f}")
    rep = check_breakpoints(sphere(d), bps, tmax=tmax)
    print(f"chain q_nu * Psi(q_(nu-1)) >= 1/4: {rep.passed}/{rep.checked} pass,"
          f" smallest ratio {float(rep.extremal_margin):.3f}")
    print(f"intrinsic uniform exponent estimate {float(intrinsic_uniform_exponent(bps).center):.4f}")

# empirical constant |xi - a/q| * sqrt(q t)
print()
xi = parse_expr_list("sqrt(1/2), sqrt(1/2)")
for t in (10, 100, 1000, 10 ** 4, 10 ** 5):
    p = point_near(xi, t)
    print(f"t = {t:6d}: q = {p.q:6d}  a = {p.a}  quality {float(p.quality.center):.4f}")
