"""High-precision oracles used to freeze expected values in the test suite.

Run ``python tools/oracles.py`` to print the table.  These computations are
independent of the package implementation: mpmath arbitrary-precision
arithmetic, direct series/quadrature, symbolic derivatives.  The frozen
numbers appear in tests with a comment pointing here.
"""

import mpmath as mp

mp.mp.dps = 50


# --- iterated-log modulus in log coordinates -------------------------------
# L(sigma) = C * h(y),  y = sigma + log(Cl),
# h(y) = y^((n-1)/n) * (ilog_{l-1} y)^(-s/n) * prod_{k=1}^{l-2} (ilog_k y)^(-1/n)


def ilog(k, y):
    for _ in range(k):
        y = mp.log(y)
    return y


def L_iterlog(sigma, l, s, C, Cl, n):
    y = sigma + mp.log(Cl)
    val = y ** (mp.mpf(n - 1) / n) * ilog(l - 1, y) ** (-mp.mpf(s) / n)
    for k in range(1, l - 1):
        val *= ilog(k, y) ** (-mp.mpf(1) / n)
    return C * val


def U_iterlog(s_val, l, sp, C, Cl, n):
    """Inverse of L by bisection in sigma."""
    f = lambda sig: L_iterlog(sig, l, sp, C, Cl, n) - s_val
    lo, hi = mp.mpf("1e-6"), mp.mpf(10)
    while f(hi) < 0:
        hi *= 4
    return mp.findroot(f, (lo, hi), solver="anderson")


def alpha_lambda_iterlog21(t_exp):
    """alpha(2^-t_exp) and lam(t_exp) for iterlog l=2, s=1, C=1, Cl=2e^e, n=2."""
    l, sp, C, n = 2, 1, 1, 2
    Cl = 2 * mp.e**mp.e
    s = t_exp * mp.log(2)
    sigma = U_iterlog(s, l, sp, C, Cl, n)
    # U'(s) = 1/L'(sigma); L' by high-precision numerical derivative
    Lp = mp.diff(lambda x: L_iterlog(x, l, sp, C, Cl, n), sigma)
    up = 1 / Lp
    t = mp.mpf(2) ** (-t_exp)
    return t / up, up  # alpha(t), lam(k) = U'(k log 2)


def psi22_truncations():
    """Integral of (L(s)/s)^2 ds from s0=log(1/0.01) to s1, iterlog l=2,s=2."""
    l, sp, C, n = 2, 2, 1, 2
    Cl = 2 * mp.e**mp.e
    f = lambda s: (L_iterlog(s, l, sp, C, Cl, n) / s) ** n
    s0 = mp.log(100)
    vals = []
    for s1 in (10, 20, 30, 40):
        vals.append(mp.quad(f, [s0, s1]))
    return vals


def cube_mean_sq():
    """Mean of |x|^2 over [0, 1/2]^2 sampled at cell centers, spacing 1/64."""
    total = mp.mpf(0)
    count = 0
    for i in range(32):
        for j in range(32):
            x = (i + mp.mpf(1) / 2) / 64
            y = (j + mp.mpf(1) / 2) / 64
            total += x**2 + y**2
            count += 1
    return total / count, mp.mpf(1) / 6


def radial_energy(a):
    """Dirichlet energy of x |x|^(a-1) on the unit disk: pi (a^2+1)/a."""
    return mp.pi * (a**2 + 1) / a


def cantor_target_ratios(p, ks):
    """rho_k = 4^-k / g(2 r'_k), g(t) = t^2 (log 1/t)^(2p)."""
    out = []
    for k in ks:
        two_rk = mp.log(4) ** (-p) * mp.mpf(2) ** (-k) * mp.mpf(k) ** (-p)
        g = two_rk**2 * mp.log(1 / two_rk) ** (2 * p)
        out.append(mp.mpf(4) ** (-k) / g)
    return out


def frame_energy_limit(p, k):
    """Leading-order generation-k energy of the tower map: see test notes."""
    two_rpk = mp.log(4) ** (-p) * mp.mpf(2) ** (-k) * mp.mpf(k) ** (-p)
    return 4**k * 8 * (two_rpk / 2) ** 2 * mp.log(2)  # heuristic scale only


if __name__ == "__main__":
    a20, lam20 = alpha_lambda_iterlog21(20)
    a_, lam21 = alpha_lambda_iterlog21(21)
    print("iterlog21 alpha(2^-20) =", mp.nstr(a20, 17))
    print("iterlog21 lam(20)      =", mp.nstr(lam20, 17))
    print("iterlog21 lam(21)      =", mp.nstr(lam21, 17))
    print("psi22 truncations s1=10,20,30,40:", [mp.nstr(v, 12) for v in psi22_truncations()])
    got, exact = cube_mean_sq()
    print("cell-center mean of |x|^2 on [0,.5]^2 @1/64:", mp.nstr(got, 17), "exact 1/6 =", mp.nstr(exact, 12))
    print("radial energy a=1/2:", mp.nstr(radial_energy(mp.mpf(1) / 2), 17))
    print("cantor ratios p=1, k=3..12:", [mp.nstr(v, 10) for v in cantor_target_ratios(1, range(3, 13))])
    print("cantor ratios p=0.75, k=12:", mp.nstr(cantor_target_ratios(mp.mpf(3) / 4, [12])[0], 10))
    print("cantor ratios p=2, k=12:", mp.nstr(cantor_target_ratios(2, [12])[0], 10))
