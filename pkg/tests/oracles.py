"""Independent reference implementations used only by the tests.

Nothing here imports the package's arithmetic: continued fractions use exact
integer recurrences, distances use mpmath at high precision, enumeration is
naive.
"""

from math import gcd, isqrt

import mpmath

mpmath.mp.dps = 80


def quadratic_cf(P, D, Q, n_terms):
    """Partial quotients of (P + sqrt(D)) / Q, D not a square."""
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    r = isqrt(D)
    out = []
    for _ in range(n_terms):
        if Q > 0:
            a = (P + r) // Q
        else:
            a = -((P + r) // -Q) - 1
        out.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    return out


def convergent_denominators(partials, qmax):
    qs, q_prev, q = [], 0, 1
    qs.append(1)
    for a in partials[1:]:
        q_prev, q = q, a * q + q_prev
        if q > qmax:
            break
        if q != qs[-1]:
            qs.append(q)
    return qs


def cf_record_qs(P, D, Q, qmax):
    return convergent_denominators(quadratic_cf(P, D, Q, 200), qmax)


def mp_value(text):
    """Evaluate a target written with sqrt/root over mpmath."""
    env = {"sqrt": mpmath.sqrt, "root": lambda k, x: mpmath.root(x, k)}
    return mpmath.mpf(eval(text.replace("/", "*mpmath.mpf(1)/"), {"mpmath": mpmath}, env))


def mp_distance(thetas, q):
    best = mpmath.mpf(0)
    a = []
    for t in thetas:
        x = q * t
        n = int(mpmath.nint(x))
        a.append(n)
        best = max(best, abs(x - n))
    return tuple(a), best


def brute_records(thetas, qmax):
    out, cur = [], None
    for q in range(1, qmax + 1):
        a, z = mp_distance(thetas, q)
        if cur is None or z < cur:
            out.append((q, a, z))
            cur = z
    return out


def naive_sphere(d, tmax):
    """Full-box loop over |a_i| <= q."""
    out = []
    for q in range(1, tmax + 1):
        def rec(prefix, left):
            if len(prefix) == d:
                if left == 0:
                    out.append((q, tuple(prefix)))
                return
            for x in range(-q, q + 1):
                if x * x <= left:
                    rec(prefix + [x], left - x * x)
        rec([], q * q)
    return out


def brute_psi(points, xi, s, tol=mpmath.mpf(10) ** -60):
    """Running strict minimum of |q xi - a|^s / q over every given point."""
    out, cur = [], None
    by_q = {}
    for q, a in points:
        by_q.setdefault(q, []).append(a)
    for q in sorted(by_q):
        best = None
        for a in sorted(by_q[q]):
            v = mpmath.sqrt(sum((q * x - ai) ** 2 for x, ai in zip(xi, a))) ** s / q
            if best is None or v < best[1] - tol:
                best = (a, v)
        if cur is None or best[1] < cur - tol:
            out.append((q, best[0], best[1]))
            cur = best[1]
    return out


def primitive(q, a):
    return gcd(q, *a) == 1
