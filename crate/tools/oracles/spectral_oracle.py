"""Lowest eigenvalues of the same finite-difference matrices, computed with
LAPACK (scipy.linalg.eigh_tridiagonal) instead of inertia bisection.
"""
import numpy as np
from scipy.linalg import eigh_tridiagonal


def phi_sq(x, l1, l2, w, z):
    a, b = l1 / 4, l2 / 3
    k = np.sqrt(a * a - b * w)
    r = np.sqrt(-w)
    y = z / (2 * r)
    t = y * (a + k) / (k + np.sqrt(k * k - y * y * (k * k - a * a)))
    s = np.arctanh(t) / r
    return (-w) / (a + k * np.cosh(2 * r * (np.abs(x) + s)))


def matrix(kind, l1, l2, w, z, L, n, even=False):
    h = 2 * L / (n - 1)
    c = (n - 1) // 2
    if even:
        x = np.arange(c + 1) * h
    else:
        x = (np.arange(n) - c) * h
    f2 = phi_sq(x, l1, l2, w, z)
    if kind == "L1":
        v = -w - 3 * l1 * f2 - 5 * l2 * f2 * f2
    elif kind == "L2":
        v = -w - l1 * f2 - l2 * f2 * f2
    else:
        v = 0 * x
    d = 2 / h**2 + v
    e = -np.ones(len(x) - 1) / h**2
    if even:
        d[0] -= z / h
        e[0] = -np.sqrt(2) / h**2
    else:
        d[c] -= z / h
    return d, e


CASES = [
    ("L1", 1, 1, -2, 1, False),
    ("L1", 1, 1, -2, -1, False),
    ("L1", 1, 1, -2, -1, True),
    ("L2", 1, 1, -2, 1, False),
    ("L1", 2, -1, -0.5, 1, False),
    ("L1", 2, -1, -0.5, -1, False),
    ("Free", 1, 1, -2, 2, False),
]

if __name__ == "__main__":
    print("// (kind, l1, l2, omega, z, even, [lowest three eigenvalues]) on L = 30/sqrt(-omega), n = 2001")
    for kind, l1, l2, w, z, even in CASES:
        L = 30 / np.sqrt(-w)
        d, e = matrix(kind, l1, l2, w, z, L, 2001, even)
        ev = eigh_tridiagonal(d, e, select="i", select_range=(0, 2), eigvals_only=True)
        vals = ", ".join(repr(float(v)) for v in ev)
        print(f'    ("{kind}", {float(l1)}, {float(l2)}, {float(w)}, {float(z)}, {str(even).lower()}, [{vals}]),')
