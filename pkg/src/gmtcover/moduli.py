"""Moduli of continuity, regularity certificates and divergence integrals.

Everything is evaluated in log coordinates: with ``s = log(1/t)`` a modulus
is represented by

    L(s)  = log(1/psi(exp(-s)))        (increasing),
    U(s)  = L^{-1}(s) = log(1/u(exp(-s))),  u = psi^{-1},

so that quantities meaningful at scales like t = exp(-2^14) never touch a
denormal float.  Derived scales:

    alpha(t) = u(t)/u'(t) = t / U'(s),
    lam(k)   = 2^-k / alpha(2^-k) = U'(k log 2).

The two divergence integrals become, in the same coordinates,

    integral |log psi(t) / log t|^n dt/t      = integral (L(s)/s)^n ds,
    integral (u(t)/u'(t))^(n-1) dt/t^n        = integral U'(s)^(1-n) ds.

Built-in families:

* ``power:C,gamma``   psi(t) = C t^gamma.
* ``iterlog:l,s,C,Cl``  exp(-C (log(Cl/t))^((n-1)/n) / ((log^(l)(Cl/t))^(s/n)
  prod_{k=2}^{l-1} (log^(k)(Cl/t))^(1/n))); divergent in the n-integral
  exactly when s <= 1.
"""

import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import _defaults
from .errors import (
    ConfigError,
    DomainRangeError,
    ModulusInvalidError,
    NumericError,
    PreconditionError,
)

LOG2 = math.log(2.0)


def iterated_log(k, t):
    """log applied k times (natural base); domain-checked."""
    if k < 0:
        raise DomainRangeError("k must be >= 0")
    v = float(t)
    for i in range(k):
        if v <= 0:
            raise DomainRangeError(f"iterated log undefined: argument <= 0 at depth {i}")
        v = math.log(v)
    return v


def iterated_exp(k, t):
    v = float(t)
    for _ in range(k):
        v = math.exp(v)
    return v


class Modulus:
    """Base class; subclasses provide L(s) and its derivative Lp(s).

    Attributes: ``t0`` (upper end of the working range), ``beta`` (constant
    of the sqrt comparison), ``n`` (ambient dimension of the integrals).
    """

    label = "modulus"
    has_analytic = True

    def __init__(self, t0, beta, n):
        if not 0 < t0 < 1:
            raise DomainRangeError("t0 must lie in (0,1)")
        if n < 2:
            raise DomainRangeError("dimension must be >= 2")
        self.t0 = float(t0)
        self.beta = float(beta)
        self.n = int(n)

    # log-domain interface -------------------------------------------------
    def L(self, s):
        raise NotImplementedError

    def Lp(self, s):
        raise NotImplementedError

    def U(self, s):
        """Inverse of L (vectorized via per-point root finding)."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=np.float64))
        out = np.array([self._u_scalar(v) for v in s_arr])
        return out if np.ndim(s) else float(out[0])

    def _u_scalar(self, s):
        lo = self._sigma_min()
        f_lo = self.L(lo) - s
        if f_lo > 0:
            raise DomainRangeError(f"{self.label}: u undefined at s={s} (t too close to 1)")
        hi = max(2.0 * lo + 1.0, 2.0 * s + 10.0)
        while self.L(hi) < s:
            hi *= 4.0
            if hi > 1e300:
                raise NumericError(f"{self.label}: inverse bracket blew up at s={s}")
        return brentq(lambda sig: self.L(sig) - s, lo, hi, xtol=1e-300, rtol=8.9e-16)

    def Up(self, s):
        """U'(s) = 1/L'(U(s)) = t u'(t)/u(t)."""
        u = self.U(s)
        return 1.0 / self.Lp(u)

    def _sigma_min(self):
        return 1e-12

    # t-domain convenience --------------------------------------------------
    def psi(self, t):
        t = np.asarray(t, dtype=np.float64)
        if np.any(np.atleast_1d(t) <= 0):
            raise DomainRangeError("psi needs t > 0")
        return np.exp(-self.L(np.log(1.0 / t)))

    def psi_inv(self, t):
        t = np.asarray(t, dtype=np.float64)
        if np.any(np.atleast_1d(t) <= 0):
            raise DomainRangeError("psi_inv needs t > 0")
        return np.exp(-self.U(np.log(1.0 / t)))

    def psi_inv_deriv(self, t):
        s = np.log(1.0 / np.asarray(t, dtype=np.float64))
        return self.Up(s) * np.exp(s - self.U(s))

    # derived scales ---------------------------------------------------------
    def alpha(self, t):
        """u(t)/u'(t); the radius scale of the second ball family."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
        if np.any(t_arr <= 0) or np.any(t_arr > self.t0 * (1 + 1e-12)):
            raise DomainRangeError(f"alpha needs 0 < t <= t0={self.t0}")
        s = np.log(1.0 / t_arr)
        up = np.array([self.Up(v) for v in s])
        if np.any(~np.isfinite(up)) or np.any(up <= 0):
            raise DomainRangeError("u'(t) vanished: alpha singular")
        out = t_arr / up
        return out if np.ndim(t) else float(out[0])

    def lam(self, k):
        """2^-k / alpha(2^-k), the weight of the k-th annulus ball."""
        k_arr = np.atleast_1d(np.asarray(k, dtype=np.int64))
        if np.any(2.0 ** (-k_arr.astype(np.float64)) > self.t0 * (1 + 1e-12)):
            raise DomainRangeError(f"lam needs 2^-k <= t0={self.t0}")
        out = np.array([self.Up(float(v) * LOG2) for v in k_arr])
        return out if np.ndim(k) else float(out[0])

    @property
    def base_index(self):
        """Smallest k with 2^-k <= t0; all weight bounds are stated from here."""
        return max(0, math.ceil(-math.log2(self.t0) - 1e-12))

    @property
    def lambda_base(self):
        return self.lam(self.base_index)

    def assert_lambda_increasing(self, k_span=40):
        ks = np.arange(self.base_index, self.base_index + k_span)
        vals = self.lam(ks)
        if np.any(np.diff(vals) < -1e-12 * vals[1:]):
            raise ModulusInvalidError(f"{self.label}: lam(k) not non-decreasing from base index")

    def __repr__(self):
        return f"<{self.label} t0={self.t0:g} beta={self.beta:g} n={self.n}>"


class PowerModulus(Modulus):
    """psi(t) = C t^gamma; u/u' = gamma t and lam is constant 1/gamma."""

    has_analytic = True

    def __init__(self, C=1.0, gamma=0.5, t0=None, beta=None, n=2):
        if C <= 0 or not 0 < gamma <= 1:
            raise DomainRangeError("need C > 0 and gamma in (0,1]")
        self.C = float(C)
        self.gamma = float(gamma)
        self.label = f"power:{C:g},{gamma:g}"
        if t0 is None:
            t0 = 0.5 if C <= 1 else min(0.5, 0.99 * C ** (-1.0 / gamma))
        if beta is None:
            s0 = math.log(1.0 / t0)
            beta = 1.05 * max(
                (s + math.log(C)) / (s / 2 + math.log(C)) for s in np.geomspace(s0, 4096, 64)
            )
        super().__init__(t0, beta, n)

    def L(self, s):
        return self.gamma * np.asarray(s, dtype=np.float64) - math.log(self.C)

    def Lp(self, s):
        return np.full_like(np.asarray(s, dtype=np.float64), self.gamma) if np.ndim(s) else self.gamma

    def U(self, s):
        out = (np.asarray(s, dtype=np.float64) + math.log(self.C)) / self.gamma
        return out if np.ndim(s) else float(out)

    def Up(self, s):
        return 1.0 / self.gamma

    def alpha(self, t):
        t_arr = np.asarray(t, dtype=np.float64)
        if np.any(np.atleast_1d(t_arr) <= 0) or np.any(np.atleast_1d(t_arr) > self.t0 * (1 + 1e-12)):
            raise DomainRangeError(f"alpha needs 0 < t <= t0={self.t0}")
        return t_arr * self.gamma if np.ndim(t) else float(t_arr) * self.gamma


class IterLogModulus(Modulus):
    """The iterated-log family with parameters (l, s, C, Cl) in dimension n.

    ``Cl`` defaults to the smallest constant with log^(l)(Cl/2) >= 1.  The
    working range t0 is shrunk until psi is increasing with margin.
    """

    has_analytic = True

    def __init__(self, l=2, s=1.0, C=1.0, Cl=None, t0=None, beta=None, n=2):
        if l < 2:
            raise DomainRangeError("need l >= 2")
        if s <= 0 or C <= 0:
            raise DomainRangeError("need s > 0 and C > 0")
        self.l = int(l)
        self.s_param = float(s)
        self.C = float(C)
        self.Cl = float(Cl) if Cl is not None else 2.0 * iterated_exp(l, 1.0)
        if iterated_log(l, self.Cl / 2.0) < 1.0 - 1e-12:
            raise DomainRangeError(f"Cl={self.Cl} violates log^({l})(Cl/2) >= 1")
        self.label = f"iterlog:{l},{s:g},{C:g},{self.Cl:g}"
        self._n_tmp = int(n)

        sigma_min = self._find_sigma_min()
        self._sigma_lo = sigma_min
        # restrict the working range so u(t) lands where L' is decreasing;
        # this is what makes the derivative-ratio condition hold
        l_at_lo = self._L_scalar(sigma_min)
        if t0 is None:
            t0 = min(0.25, 0.99 * math.exp(-l_at_lo))
        elif math.log(1.0 / t0) < l_at_lo:
            raise DomainRangeError(
                f"{self.label}: t0={t0:g} exceeds the valid range bound {math.exp(-l_at_lo):g}"
            )
        if beta is None:
            beta = self._default_beta(t0, n)
        super().__init__(t0, beta, n)

    # scalar core ------------------------------------------------------------
    def _hg_parts(self, y):
        """(h_g(y), h_g'(y)/h_g(y)); requires all iterated logs positive."""
        n = self._n_tmp
        logs = [y]
        for _ in range(self.l - 1):
            prev = logs[-1]
            if prev <= 0:
                return None
            logs.append(math.log(prev))
        if logs[-1] <= 0:
            return None
        # log h = ((n-1)/n) log y - (s/n) log ilog_{l-1} - (1/n) sum_{k=1}^{l-2} log ilog_k
        log_h = (n - 1) / n * math.log(y) - self.s_param / n * math.log(logs[self.l - 1])
        dlog = (n - 1) / (n * y)
        # d/dy ilog_k = 1 / (y * prod_{j<k} ilog_j)
        prod = 1.0
        for k in range(1, self.l - 1):
            log_h -= (1.0 / n) * math.log(logs[k])
            prod_k = y * prod
            dlog -= (1.0 / n) / (prod_k * logs[k])
            prod *= logs[k]
        dlog -= (self.s_param / n) / (y * prod * logs[self.l - 1])
        return math.exp(log_h), dlog

    def _L_scalar(self, sigma):
        y = sigma + math.log(self.Cl)
        parts = self._hg_parts(y)
        if parts is None:
            raise DomainRangeError(f"{self.label}: outside valid range at sigma={sigma}")
        return self.C * parts[0]

    def _Lp_scalar(self, sigma):
        y = sigma + math.log(self.Cl)
        parts = self._hg_parts(y)
        if parts is None:
            raise DomainRangeError(f"{self.label}: outside valid range at sigma={sigma}")
        h, dlog = parts
        return self.C * h * dlog

    def L(self, s):
        if np.ndim(s):
            return np.array([self._L_scalar(v) for v in np.asarray(s, dtype=np.float64)])
        return self._L_scalar(float(s))

    def Lp(self, s):
        if np.ndim(s):
            return np.array([self._Lp_scalar(v) for v in np.asarray(s, dtype=np.float64)])
        return self._Lp_scalar(float(s))

    def _sigma_min(self):
        return self._sigma_lo

    def _find_sigma_min(self):
        """Smallest sigma from which psi is increasing AND L' is non-increasing.

        Both are needed: the first makes psi invertible on the range, the
        second makes (u'/u)*t decreasing in t there.
        """
        grid = np.geomspace(1e-6, 1e7, 600)
        lp = np.full(len(grid), np.nan)
        for i, sig in enumerate(grid):
            parts = self._hg_parts(sig + math.log(self.Cl))
            if parts is not None and parts[1] > 0:
                lp[i] = self.C * parts[0] * parts[1]
        last_bad = -1
        for i in range(len(grid) - 1):
            if not np.isfinite(lp[i]):
                last_bad = i
            elif np.isfinite(lp[i + 1]) and lp[i + 1] > lp[i] * (1 + 1e-12):
                last_bad = i
        if last_bad + 1 >= len(grid) - 1:
            raise ModulusInvalidError(f"{self.label}: no valid working range found")
        return float(grid[last_bad + 1])

    def _default_beta(self, t0, n):
        s0 = max(2.0 * self._L_scalar(self._sigma_lo) * 1.0001, 2 * math.log(1.0 / t0), 1.0)
        grid = np.geomspace(s0, 2.0**20, 96)
        ratios = []
        for s in grid:
            ratios.append(self._u_scalar(s) / self._u_scalar(s / 2))
        return 1.05 * max(ratios)


class CallableModulus(Modulus):
    """User-supplied psi; inverse by bracketed root finding, u' by central
    differences with step t*1e-6 unless supplied analytically."""

    has_analytic = False

    def __init__(self, psi, t0, beta, n=2, label="custom", psi_inv=None, psi_inv_deriv=None):
        self._psi = psi
        self._psi_inv = psi_inv
        self._psi_inv_deriv = psi_inv_deriv
        self.label = label
        super().__init__(t0, beta, n)

    def L(self, s):
        s_arr = np.asarray(s, dtype=np.float64)
        t = np.exp(-np.minimum(s_arr, 690.0))
        if np.any(s_arr > 690.0):
            raise DomainRangeError(f"{self.label}: t underflows float range (s > 690)")
        val = self._psi(t)
        if np.any(np.asarray(val) <= 0):
            raise ModulusInvalidError(f"{self.label}: psi must be positive")
        return -np.log(val)

    def Lp(self, s):
        h = 1e-6
        return (self.L(np.asarray(s) + h) - self.L(np.asarray(s) - h)) / (2 * h)

    def _u_scalar(self, s):
        if self._psi_inv is not None:
            return -math.log(self._psi_inv(math.exp(-s)))
        return super()._u_scalar(s)

    def psi_inv_deriv(self, t):
        if self._psi_inv_deriv is not None:
            return self._psi_inv_deriv(np.asarray(t, dtype=np.float64))
        return super().psi_inv_deriv(t)


def modulus_from_spec(spec, n=2):
    """Parse 'power:C,gamma' or 'iterlog:l,s[,C[,Cl]]'."""
    try:
        name, _, args = spec.partition(":")
        vals = [float(x) for x in args.split(",")] if args else []
        if name == "power":
            C, gamma = (vals + [1.0, 0.5])[:2] if vals else (1.0, 0.5)
            return PowerModulus(C=C, gamma=gamma, n=n)
        if name == "iterlog":
            l = int(vals[0]) if vals else 2
            s = vals[1] if len(vals) > 1 else 1.0
            C = vals[2] if len(vals) > 2 else 1.0
            Cl = vals[3] if len(vals) > 3 else None
            return IterLogModulus(l=l, s=s, C=C, Cl=Cl, n=n)
    except (IndexError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad modulus spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown modulus family {name!r} (expected power: or iterlog:)")


# --------------------------------------------------------------------------
# regularity certificate
# --------------------------------------------------------------------------


class AllowabilityReport:
    """Outcome of the three regularity checks on a geometric grid."""

    CONDITIONS = ("inverse_ratio_decreasing", "sqrt_log_comparison", "log_slope_monotone")

    def __init__(self, entries, grid):
        self.entries = entries  # {name: {...}}
        self.grid = grid

    @property
    def passed(self):
        return all(e["pass"] for e in self.entries.values())

    def to_json(self):
        return [
            {
                "condition": name,
                "pass": bool(e["pass"]),
                "worst_t": float(e["worst_t"]),
                "worst_value": float(e["worst_value"]),
            }
            for name, e in self.entries.items()
        ]

    def __repr__(self):
        status = ", ".join(f"{k}={'ok' if e['pass'] else 'FAIL'}" for k, e in self.entries.items())
        return f"<AllowabilityReport {status}>"


def _pseudo_decreasing_violation(values):
    """max over pairs i<j of values[j]/values[i]; <= C_pm means decreasing."""
    prefix_min = np.minimum.accumulate(values)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = values[1:] / prefix_min[:-1]
    j = int(np.argmax(ratios)) + 1
    return float(ratios[j - 1]), j


def check_allowable(m, grid_points=64, eps=None, c_pm=None):
    """Evaluate the three regularity conditions on a geometric grid in (eps, t0].

    Monotonicity is tested in the pseudomonotone sense: a condition passes
    when its worst pairwise violation ratio stays below ``c_pm``.
    """
    if grid_points < 16:
        raise PreconditionError("grid_points must be >= 16")
    if m.t0 >= 1:
        raise PreconditionError("modulus t0 must be < 1")
    c_pm = c_pm if c_pm is not None else _defaults.PSEUDOMONOTONE_C
    eps = eps if eps is not None else _defaults.ALLOWABILITY_GRID_EPS
    if not 0 < eps < m.t0:
        raise DomainRangeError("need 0 < eps < t0")

    s_lo = math.log(1.0 / m.t0)
    s_hi = math.log(1.0 / eps)
    s_grid = np.geomspace(max(s_lo, 1e-12), s_hi, grid_points)
    t_grid = np.exp(-s_grid)

    # invertibility: psi(u(t)) = t within 1e-9 relative
    u_vals = np.array([m._u_scalar(s) for s in s_grid])
    round_trip = np.array([m.L(u) for u in u_vals])
    if np.any(np.abs(round_trip - s_grid) > 1e-9 * np.maximum(np.abs(s_grid), 1.0)):
        raise ModulusInvalidError(f"{m.label}: psi(u(t)) != t beyond tolerance on the grid")

    # (a) U'(s) non-decreasing in s  <=>  (u'/u)*t decreasing in t
    up = np.array([1.0 / m.Lp(u) for u in u_vals])
    viol_a, j_a = _pseudo_decreasing_violation(up[::-1])  # reverse: decreasing in s-order
    entry_a = {
        "pass": viol_a <= c_pm,
        "worst_t": t_grid[::-1][j_a],
        "worst_value": viol_a,
    }

    # (b) U(s) <= beta * U(s/2); evaluated where u(sqrt t) is defined
    entry_b = {"pass": True, "worst_t": t_grid[0], "worst_value": 0.0}
    ratios, ts = [], []
    for s, t in zip(s_grid, t_grid):
        try:
            u_half = m._u_scalar(s / 2)
        except (DomainRangeError, NumericError):
            continue
        u_full = m._u_scalar(s)
        ratios.append(u_full / (m.beta * u_half))
        ts.append(t)
    if ratios:
        worst = int(np.argmax(ratios))
        entry_b = {
            "pass": ratios[worst] <= 1.0 + 1e-12,
            "worst_t": ts[worst],
            "worst_value": float(ratios[worst]),
        }

    # (c) s L'(s)/L(s) monotone in either direction
    lvals = np.asarray(m.L(s_grid), dtype=np.float64)
    lpvals = np.asarray(m.Lp(s_grid), dtype=np.float64)
    if np.any(lvals <= 0):
        raise ModulusInvalidError(f"{m.label}: log(1/psi) <= 0 inside the working range")
    phi = s_grid * lpvals / lvals
    viol_dec, j_dec = _pseudo_decreasing_violation(phi)
    viol_inc, j_inc = _pseudo_decreasing_violation(phi[::-1])
    if viol_inc <= viol_dec:
        entry_c = {
            "pass": viol_inc <= c_pm,
            "worst_t": t_grid[::-1][j_inc],
            "worst_value": viol_inc,
            "direction": "non-decreasing in t",
        }
    else:
        entry_c = {
            "pass": viol_dec <= c_pm,
            "worst_t": t_grid[j_dec],
            "worst_value": viol_dec,
            "direction": "non-increasing in t",
        }

    entries = dict(zip(AllowabilityReport.CONDITIONS, (entry_a, entry_b, entry_c)))
    return AllowabilityReport(entries, {"eps": eps, "t0": m.t0, "points": grid_points})


# --------------------------------------------------------------------------
# divergence integrals and classification
# --------------------------------------------------------------------------


def _quad_log_domain(f, s0, s1):
    """Integral of f(s) ds over [s0, s1], evaluated in sigma = log(s)."""

    def integrand(sig):
        s = math.exp(sig)
        return f(s) * s

    val, err = quad(integrand, math.log(s0), math.log(s1), epsrel=1e-9, epsabs=0.0, limit=400)
    if err > 1e-6 * abs(val) + 1e-12:
        raise NumericError(f"quadrature did not reach tolerance (err {err:g})", partial=val)
    return val


def _integral_bounds(m, eps, upper, s_eps):
    if upper is None or not 0 < upper <= m.t0 * (1 + 1e-12):
        raise DomainRangeError("need 0 < upper <= t0")
    s0 = math.log(1.0 / upper)
    s1 = s_eps if s_eps is not None else (math.log(1.0 / eps) if eps and eps > 0 else None)
    if s1 is None or s1 <= s0:
        raise DomainRangeError("need 0 < eps < upper <= t0")
    return s0, s1


def divergence_integral_psi(m, eps, upper, n=None, s_eps=None):
    """Truncated integral of |log psi(t)/log t|^n dt/t over (eps, upper].

    Computed as the integral of (L(s)/s)^n ds in doubled-log coordinates for
    stability over enormous ranges; relative error <= 1e-6.  For cutoffs
    below the float range pass ``s_eps = log(1/eps)`` instead of ``eps``.
    """
    n = n if n is not None else m.n
    s0, s1 = _integral_bounds(m, eps, upper, s_eps)
    return _quad_log_domain(lambda s: (m.L(s) / s) ** n, s0, s1)


def divergence_integral_u(m, eps, upper, n=None, s_eps=None):
    """Truncated integral of (u/u')^(n-1) dt/t^n = integral U'(s)^(1-n) ds."""
    n = n if n is not None else m.n
    s0, s1 = _integral_bounds(m, eps, upper, s_eps)
    return _quad_log_domain(lambda s: (1.0 / m.Lp(m._u_scalar(s))) ** (1 - n), s0, s1)


def _bertrand_exponents(m, n, levels=4):
    """Iterated slowly-varying exponents of the integrand (L(s)/s)^n ds.

    With I(s) ~ 1/(s^a0 (log s)^a1 (loglog s)^a2 ...), the integral diverges
    at the first exponent below 1 and converges at the first above 1
    (Bertrand series criterion).  Exponents are extracted analytically from
    L, L' and extrapolated in the next log scale.
    """
    i_grid = np.arange(60, 996, 48, dtype=np.float64)
    s = 2.0**i_grid
    L = np.array([m.L(v) for v in s])
    Lp = np.array([m.Lp(v) for v in s])
    a = n * (1.0 - s * Lp / L)  # -d log I / d log s
    scales = [np.log(s)]
    for _ in range(levels):
        scales.append(np.log(scales[-1]))
    exponents = []
    for level in range(levels):
        # a(s) = A + B / w(s) + o(1/w); the limit A is the level exponent
        x = 1.0 / scales[level]
        A_mat = np.stack([np.ones_like(x), x], axis=1)
        coef, *_ = np.linalg.lstsq(A_mat, a, rcond=None)
        exponents.append(float(coef[0]))
        a = (a - 1.0) * scales[level]
    return exponents


def classify_divergence(m, n=None, j_max=None, threshold=None, growth=None, cauchy_tol=None):
    """'divergent' / 'convergent' / 'undecided' for the psi divergence integral.

    Primary rule: truncations at eps_j = exp(-2^j).  Large and steadily
    growing values classify as divergent; a Cauchy tail as convergent.  When
    the truncation rule is inconclusive and the modulus exposes analytic
    derivatives, a Bertrand-scale exponent analysis refines the answer.
    """
    n = n if n is not None else m.n
    j_max = j_max if j_max is not None else _defaults.DIVERGENCE_J_MAX
    threshold = threshold if threshold is not None else _defaults.DIVERGENCE_THRESHOLD
    growth = growth if growth is not None else _defaults.DIVERGENCE_GROWTH
    cauchy_tol = cauchy_tol if cauchy_tol is not None else _defaults.CAUCHY_REL_TOL

    upper = min(m.t0, math.exp(-2.0))
    if not m.has_analytic:
        j_max = min(j_max, 9)  # t-domain evaluation floors at ~1e-290
    j_lo = max(3, int(math.log2(math.log(1.0 / upper))) + 1)
    js = list(range(j_lo, j_max + 1))
    vals = np.array([divergence_integral_psi(m, None, upper, n, s_eps=2.0**j) for j in js])

    last = vals[-4:]
    ratios = last[1:] / last[:-1]
    increments = np.abs(np.diff(last)) / np.abs(last[1:])
    if vals[-1] > threshold and np.all(ratios >= growth):
        return "divergent"
    if np.all(increments < cauchy_tol):
        return "convergent"
    if not m.has_analytic:
        return "undecided"

    tol = _defaults.BERTRAND_BOUNDARY_TOL
    for expo in _bertrand_exponents(m, n):
        if expo < 1.0 - tol:
            return "divergent"
        if expo > 1.0 + tol:
            return "convergent"
    return "undecided"


def alpha(m, t):
    return m.alpha(t)


def lambda_k(m, k):
    return m.lam(k)
