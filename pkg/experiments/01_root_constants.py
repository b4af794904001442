"""
Root constants
==============

Certified enclosures of the bounds H_d, H_{d,s} and G_m for uniform exponents.
"""

from fractions import Fraction

from diophapprox.roots import closed_form_d1, solve_G, solve_H, solve_Hds

# H_d: decreasing in d, tends to 1/2
for d in range(1, 9):
    r = solve_H(d)
    print(f"H_{d}     {float(r.value.center):.15f}   width {float(r.hi - r.lo):.1e}")

# H_{1,s} has a closed form; the bisection agrees with it
print()
for s in range(2, 11):
    print(f"H_(1,{s:<2}) {float(solve_Hds(1, s).value.center):.15f}   closed form {float(closed_form_d1(s).center):.15f}")

# a small table of H_{d,s}
print()
print("d\\s " + "".join(f"{s:>10}" for s in range(2, 7)))
for d in range(1, 6):
    print(f"{d:<4}" + "".join(f"{float(solve_Hds(d, s).value.center):10.6f}" for s in range(2, 7)))

# G_m as a function of the uniform exponent
print()
for m in (2, 3, 4):
    row = [float(solve_G(m, Fraction(k, 10)).value.center) for k in range(1, 10)]
    print(f"G_{m}(w), w = 0.1..0.9:", " ".join(f"{v:.4f}" for v in row))
