"""Independent reference values frozen into the C++ tests.

Run with python3; needs numpy, scipy and mpmath.
"""
import numpy as np
import mpmath as mp
from scipy import integrate

MASK = (1 << 64) - 1


def splitmix64(z):
    z = (z + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def counter_stream(seed, stream, n):
    key = splitmix64(seed) ^ splitmix64((stream * 0xD1B54A32D192ED03 + 1) & MASK)
    return [splitmix64(key ^ splitmix64(i)) for i in range(n)]


print("rng seed 7 stream 0:", [hex(v) for v in counter_stream(7, 0, 3)])
print("rng seed 0 stream 5:", [hex(v) for v in counter_stream(0, 5, 2)])

x, w = np.polynomial.legendre.leggauss(5)
print("gl5 nodes", repr(x.tolist()))
print("gl5 weights", repr(w.tolist()))

# Unit instanton energy density 48 / (1 + r^2)^4 truncated to a ball.
mp.mp.dps = 30
for R in (1, 3, 40):
    e = 0.5 * 2 * mp.pi**2 * mp.quad(lambda r: 48 * r**3 / (1 + r**2) ** 4, [0, R])
    print(f"ym ball R={R}:", mp.nstr(e, 20))

PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def qmul(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
                     w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                     w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
                     w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2])


def full(form6):
    F = np.zeros((4, 4, 4))
    for p, (m, n) in enumerate(PAIRS):
        F[m, n] = form6[p]
        F[n, m] = -form6[p]
    return F


def hopf_points(n):
    """Product Gauss rule on S^3 in Hopf coordinates (eta, xi1, xi2)."""
    g, gw = np.polynomial.legendre.leggauss(n)
    s = 0.5 * (g + 1)
    out = []
    for si, wi in zip(s, gw):
        ce, se = np.sqrt(1 - si), np.sqrt(si)
        for a in range(2 * n):
            for b in range(2 * n):
                t1 = 2 * np.pi * a / (2 * n)
                t2 = 2 * np.pi * b / (2 * n)
                p = np.array([ce * np.cos(t1), ce * np.sin(t1), se * np.cos(t2), se * np.sin(t2)])
                out.append((p, 0.5 * wi * 0.5 * (2 * np.pi / (2 * n)) ** 2))
    return out


def boundary_integral(xi6, a_fn, R, n=24):
    """int over |x| = R of Tr(inversion^* xi ^ a) with the outward normal first."""
    X = full(xi6)
    tot = 0.0
    for p, wq in hopf_points(n):
        x = R * p
        r2 = x @ x
        J = (np.eye(4) - 2 * np.outer(x, x) / r2) / r2
        P = np.einsum("am,bn,abq->mnq", J, J, X)
        a = a_fn(x)
        # flux of Tr(P ^ a) through the sphere: sum over mu<nu, rho of the volume coefficient
        flux = np.zeros(4)
        for mu in range(4):
            for nu in range(4):
                for rho in range(4):
                    if len({mu, nu, rho}) < 3:
                        continue
                    omit = 6 - mu - nu - rho
                    perm = [mu, nu, rho]
                    sign = np.linalg.det(np.eye(4)[[omit] + perm])
                    tr = 2 * qmul(P[mu, nu], a[rho])[0]
                    # dx^mu dx^nu dx^rho = sign(omit,mu,nu,rho) iota_{e_omit} vol
                    flux[omit] += 0.5 * sign * tr
        tot += (flux @ p) * wq * R**3
    return tot


I = np.array([0.0, 1, 0, 0])
J_ = np.array([0.0, 0, 1, 0])
e1 = np.array([1.0, 0, 0, 0, 0, -1])
e2 = np.array([0.0, 1, 0, 0, 1, 0])

xi = np.outer(e1, I)


def mono(x):
    a = np.zeros((4, 4))
    a[1] = x[0] * I
    return a


print("boundary x1 dx2 (x) i, R=0.3:", repr(boundary_integral(xi, mono, 0.3)))
print("reference pi^2:", repr(np.pi**2))

xi2 = np.outer(e1, I) + np.outer(e2, J_)


def mixed(x):
    a = np.zeros((4, 4))
    a[1] = x[0] * I
    a[3] = x[0] * x[0] * x[3] * J_ + 0.5 * x[1] ** 2 * x[0] * I
    a[2] = x[1] * x[1] * x[2] * J_
    return a


for R in (0.5, 1.0):
    print(f"boundary mixed R={R}:", repr(boundary_integral(xi2, mixed, R)))
