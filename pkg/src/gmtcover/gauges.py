"""Dimension gauges for generalized Hausdorff content.

A gauge is a non-decreasing function h with h(0+) = 0 and h > 0 on (0, inf).
Gauges of the form t^a * (log 1/t)^q are only increasing up to
t = exp(-q/a); beyond that point evaluation is clamped, which keeps h a
gauge and leaves every content computation on small sets unchanged.
"""

import numpy as np

from .errors import ConfigError, DomainRangeError


class Gauge:
    def __init__(self, fn, label, t_cap=1.0, doubling_constant=None):
        self._fn = fn
        self.label = label
        self.t_cap = float(t_cap)
        if doubling_constant is None:
            doubling_constant = self._measure_doubling()
        self.doubling_constant = float(doubling_constant)

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if np.any(t < 0):
            raise DomainRangeError("gauge argument must be non-negative")
        clamped = np.minimum(t, self.t_cap)
        out = np.where(t > 0, self._fn(np.maximum(clamped, 1e-300)), 0.0)
        return out if out.ndim else float(out)

    def _measure_doubling(self, grid_points=512):
        t = np.geomspace(1e-12, 0.5, grid_points)
        ratios = self(2 * t) / self(t)
        return float(ratios.max()) * (1 + 1e-9)

    def check(self, grid_points=256, lo=1e-12):
        """Monotonicity, positivity, h(0+)=0 and doubling on a geometric grid."""
        t = np.geomspace(lo, min(1.0, 2 * self.t_cap), grid_points)
        v = self(t)
        report = {
            "non_decreasing": bool(np.all(np.diff(v) >= -1e-15 * v[1:])),
            "positive": bool(np.all(v > 0)),
            "vanishes_at_zero": bool(self(lo) < self(self.t_cap) * 1e-3 or self(1e-200) < 1e-100),
            "doubling_ok": bool(
                np.all(self(2 * t[t <= 0.5]) <= self.doubling_constant * np.asarray(self(t[t <= 0.5])))
            ),
        }
        report["passed"] = all(report.values())
        return report

    def __repr__(self):
        return f"Gauge({self.label})"


def power_gauge(a):
    """h(t) = t^a."""
    if a < 0:
        raise DomainRangeError("exponent must be non-negative")
    return Gauge(lambda t: t**a, f"power:{a:g}", t_cap=1.0, doubling_constant=2.0**a)


def power_log_gauge(a, q):
    """h(t) = t^a * (log 1/t)^q, clamped past its maximum at exp(-q/a)."""
    if a <= 0 or q < 0:
        raise DomainRangeError("need a > 0 and q >= 0")
    if q == 0:
        return power_gauge(a)
    t_cap = np.exp(-q / a)
    return Gauge(lambda t: t**a * np.log(1.0 / t) ** q, f"powerlog:{a:g},{q:g}", t_cap=t_cap)


def gauge_from_spec(spec):
    """Parse 'power:a' or 'powerlog:a,q'."""
    try:
        name, _, args = spec.partition(":")
        vals = [float(x) for x in args.split(",")] if args else []
        if name == "power":
            (a,) = vals
            return power_gauge(a)
        if name == "powerlog":
            a, q = vals
            return power_log_gauge(a, q)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad gauge spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown gauge {name!r} (expected power: or powerlog:)")
