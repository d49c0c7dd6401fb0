"""Reference values for the charge and its frequency slope.

The norm comes from 40-digit quadrature of phi^2 with the shift found by
bisection. Derivatives are mpmath finite differences of that quadrature, so
no closed form is involved.
"""
from mpmath import mp, mpf, sqrt, cosh, quad, inf, diff

from profile_oracle import consts, r_inverse_bisect

mp.dps = 30


def norm_sq(l1, l2, w, z):
    w = mpf(w)
    a, _, k = consts(l1, l2, w)
    r = sqrt(-w)
    b = r_inverse_bisect(mpf(z) / (2 * r), l1, l2, w)
    f = lambda x: (-w) / (a + k * cosh(2 * r * (x + b)))
    pts = [0, max(-b, 0) + mpf("1e-30"), max(-b, 0) + 2 / r, inf]
    return 2 * quad(f, sorted(set(pts)))


def shift(l1, l2, w, z):
    w = mpf(w)
    return r_inverse_bisect(mpf(z) / (2 * sqrt(-w)), l1, l2, w)


if __name__ == "__main__":
    print("// norm: (l1, l2, omega, z, ||phi||^2)")
    for (l1, l2, w, z) in [(1, 1, -1, 0), (1, 1, -3, 2), (1, 1, -3, -2), (1, 1, -2, -0.86),
                           (1, 1, -10, 3), (2, -1, -0.5, 1), (2, -1, -0.5, -1), (4, -2, -0.4, -0.8)]:
        print(f"    ({float(l1)}, {float(l2)}, {float(w)}, {float(z)}, {mp.nstr(norm_sq(l1, l2, w, z), 17)}),")
    print("// slope: (l1, l2, omega, z, d/domega ||phi||^2, db/domega)")
    for (l1, l2, w, z) in [(1, 1, -2, -0.86), (1, 1, -2, -0.9), (1, 1, -5, 0.5), (1, 1, -1, 0),
                           (1, 1, -3, -2), (2, -1, -0.5, 1), (2, -1, -0.5, -1)]:
        d = diff(lambda ww: norm_sq(l1, l2, ww, z), mpf(w))
        db = diff(lambda ww: shift(l1, l2, ww, z), mpf(w))
        print(f"    ({float(l1)}, {float(l2)}, {float(w)}, {float(z)}, {mp.nstr(d, 17)}, {mp.nstr(db, 17)}),")
