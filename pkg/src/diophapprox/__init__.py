"""Certified experiments on uniform Diophantine exponents, lifted targets and
intrinsic approximation on spheres and other level sets of forms."""

from .best_approx import BestApproxRecord, Target, distance, lift_poly, lift_square, scan
from .exact import P_MAX, Ball, Ordering, ball_compare, ball_eval, parse_expr
from .exponents import ExponentReport, check_bounds, estimate_ordinary, estimate_uniform, exponent_report
from .polynomial import Poly, constants, load_poly, parse_poly, sphere
from .roots import solve_G, solve_H, solve_Hds
from .variety import (
    PsiBreakpoint,
    RationalPoint,
    intrinsic_uniform_exponent,
    point_near,
    psi_breakpoints,
    sphere_points,
    variety_points,
)
from .verify import (
    VerificationReport,
    case2_diagnostic,
    check_breakpoints,
    check_lemma2,
    check_simplex_i,
    check_simplex_ii,
    exhaustive_simplex,
)

__version__ = "0.1.0"
