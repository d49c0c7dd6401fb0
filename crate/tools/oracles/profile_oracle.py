"""Reference values for the profile tests.

phi is evaluated independently at 50 digits. r_inverse is solved by
bisection on r_map, and the derivatives come from mpmath's numerical
differentiation, not from hand-derived formulas.
"""
from mpmath import mp, mpf, sqrt, sinh, cosh, diff

mp.dps = 50


def consts(l1, l2, w):
    a = mpf(l1) / 4
    b = mpf(l2) / 3
    k = sqrt(a * a - b * w)
    return a, b, k


def r_map(s, l1, l2, w):
    a, _, k = consts(l1, l2, w)
    r = sqrt(-mpf(w))
    return k * sinh(2 * r * s) / (a + k * cosh(2 * r * s))


def r_inverse_bisect(y, l1, l2, w):
    lo, hi = mpf(-60), mpf(60)
    for _ in range(400):
        mid = (lo + hi) / 2
        if r_map(mid, l1, l2, w) < y:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def phi(x, l1, l2, w, z):
    a, _, k = consts(l1, l2, w)
    w = mpf(w)
    r = sqrt(-w)
    b = r_inverse_bisect(mpf(z) / (2 * r), l1, l2, w)
    return 1 / sqrt(a / (-w) + k / (-w) * cosh(2 * r * (abs(x) + b)))


POINTS = [
    (1, 1, -1, 0, 0.7),
    (2, -1, -0.5, 1, -1.3),
    (1, 1, -3, 2, 0.4),
    (1, 1, -3, -2, 0.25),
    (1, 1, -3, -2, -1.1),
    (4, -2, -0.4, -0.8, 2.0),
    (0.5, 3, -7, 1.5, 0.05),
]

if __name__ == "__main__":
    print("// (l1, l2, omega, z, x, phi, dphi, d2phi)")
    for (l1, l2, w, z, x) in POINTS:
        ph = phi(mpf(x), l1, l2, w, z)
        side = 1 if x > 0 else -1
        d1 = diff(lambda t: phi(t, l1, l2, w, z), mpf(x))
        d2 = diff(lambda t: phi(t, l1, l2, w, z), mpf(x), 2)
        head = ", ".join(repr(float(v)) for v in (l1, l2, w, z, x))
        print(f"    ({head}, {mp.nstr(ph, 17)}, {mp.nstr(d1, 17)}, {mp.nstr(d2, 17)}),")
    print("// r_inverse by bisection: (l1, l2, omega, y, s)")
    for (l1, l2, w, y) in [(1, 1, -3, 2 / (2 * 3 ** 0.5)), (1, 1, -1, 0.9), (1, 1, -1, -0.5), (2, -1, -0.5, 0.1)]:
        s = r_inverse_bisect(mpf(y), l1, l2, w)
        head = ", ".join(repr(float(v)) for v in (l1, l2, w))
        print(f"    ({head}, {mp.nstr(mpf(y), 17)}, {mp.nstr(s, 17)}),")
