"""Cantor-tower homeomorphism: a small Cantor set carried onto a large one.

Geometry (all squares concentric, sup-norm radii = half side lengths):

* source tower: 2 r_k = sigma^k, 2 R_k = sigma^(k-1)/2, sigma < 1/2;
* target tower: 2 r'_k = (log 4)^(-p) 2^(-k) k^(-p) and
  2 R'_k = (log 4)^(-p) 2^(-k) (k-1)^(-p) for k >= 2, with p > 1/2.

Generation k holds 4^k nested squares Q_{ki} inside P_{ki}; the frames
A_{ki} = P_{ki} minus Q_{ki} tile the complement of the limit Cantor set.
Both towers satisfy R_{k+1} = r_k / 2 exactly, so the four generation-(k+1)
outer squares tile each Q_{ki} and the piecewise map below is continuous.

The map h sends frame to frame by the sup-norm radial stretching
rho(x) = (a ||x|| + b) x / ||x||, a = (R'-r')/(R-r), b = (R r'-R' r)/(R-r),
fixed to the identity outside [0,1]^2.  The generation-1 outer squares are
anchored as the four quadrants of [0,1]^2 in both towers (R'_1 = R_1 = 1/4),
which glues h to the identity across the boundary.  Points surviving all
generations map to the center of their depth-K target square (finite-depth
surrogate; displacement error at most the target square diameter).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainRangeError, PreconditionError, ResolutionError
from .hausdorff import MassTree, mass_distribution_lower

LOG4 = math.log(4.0)

_QUADRANTS = np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]], dtype=np.float64)


class CantorTower:
    """Concentric square tower; radii are sup-norm half sides."""

    def __init__(self, kind, param, depth):
        if depth < 1 or depth > 24:
            raise DomainRangeError("depth must be in 1..24")
        self.kind = kind
        self.param = float(param)
        self.depth = int(depth)
        ks = np.arange(1, depth + 1, dtype=np.float64)
        if kind == "source":
            sigma = self.param
            if not 0 < sigma < 0.5:
                raise DomainRangeError("need 0 < sigma < 1/2")
            self.r = sigma**ks / 2.0
            self.R = sigma ** (ks - 1) / 4.0
        elif kind == "target":
            # geometry is valid for any p > 0; p > 1/2 is only needed for
            # finite energy and the positive-content witness
            p = self.param
            if not p > 0:
                raise DomainRangeError("need p > 0")
            self.r = LOG4 ** (-p) * 2.0 ** (-ks) * ks ** (-p) / 2.0
            self.R = np.empty(depth)
            self.R[0] = 0.25
            if depth > 1:
                self.R[1:] = LOG4 ** (-p) * 2.0 ** (-ks[1:]) * (ks[1:] - 1.0) ** (-p) / 2.0
        else:
            raise DomainRangeError(f"unknown tower kind {kind!r}")
        if np.any(self.r >= self.R):
            raise DomainRangeError("tower degenerate: need r_k < R_k at every generation")

    @property
    def root_half_side(self):
        return 0.5

    def centers(self, k, budget=5_000_000):
        """All 4^k generation-k square centers (digit expansion)."""
        if 4**k > budget:
            raise DomainRangeError(f"4^{k} centers exceed the enumeration budget")
        c = np.array([[0.5, 0.5]])
        for g in range(1, k + 1):
            c = (c[:, None, :] + _QUADRANTS[None, :, :] * self.R[g - 1]).reshape(-1, 2)
        return c

    def center_of(self, k, i):
        """Center of the i-th generation-k square, digits base 4 (0-based)."""
        c = np.array([0.5, 0.5])
        digits = []
        v = i
        for _ in range(k):
            digits.append(v % 4)
            v //= 4
        for g, d in enumerate(reversed(digits), start=1):
            c = c + _QUADRANTS[d] * self.R[g - 1]
        return c

    def natural_tree(self, gauge_diams=None):
        """Uniform mass tree: mass 4^-k per generation-k square; declared
        diameters default to the sup-norm side 2 r_k."""
        diams = gauge_diams if gauge_diams is not None else 2.0 * self.r
        return MassTree.uniform(list(diams), branching=4)


def build_tower(kind, param, depth):
    return CantorTower(kind, param, depth)


@dataclass(frozen=True)
class RadialStretchParams:
    r: float
    R: float
    r_target: float
    R_target: float
    center: tuple
    target_center: tuple

    @property
    def a(self):
        return (self.R_target - self.r_target) / (self.R - self.r)

    @property
    def b(self):
        return (self.R * self.r_target - self.R_target * self.r) / (self.R - self.r)

    def boundary_mismatch(self):
        """(a r + b - r', a R + b - R'); both vanish by construction."""
        return (
            self.a * self.r + self.b - self.r_target,
            self.a * self.R + self.b - self.R_target,
        )


def radial_stretch(x, params):
    """Sup-norm radial map of the annulus r <= ||x - center|| <= R onto the
    annulus r' <= ||y - target_center|| <= R'."""
    x = np.asarray(x, dtype=np.float64)
    rel = x - np.asarray(params.center)
    rho = np.max(np.abs(rel))
    if rho < params.r * (1 - 1e-12) or rho > params.R * (1 + 1e-12):
        raise DomainRangeError("point outside the stretch annulus")
    factor = (params.a * rho + params.b) / rho
    return np.asarray(params.target_center) + factor * rel


def _descend(points, source, target, depth=None):
    """Vectorized joint descent; returns target points plus location info."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    K = depth if depth is not None else source.depth
    out = pts.copy()
    inside = np.all((pts >= 0.0) & (pts <= 1.0), axis=1)
    active = inside.copy()
    cs = np.full_like(pts, 0.5)
    ct = np.full_like(pts, 0.5)
    frame_gen = np.zeros(len(pts), dtype=np.int64)  # 0: not in any frame
    frame_idx = np.zeros(len(pts), dtype=np.int64)
    boundary = np.zeros(len(pts), dtype=bool)
    for k in range(1, K + 1):
        if not active.any():
            break
        rel = pts[active] - cs[active]
        sgn = np.where(rel > 0, 1.0, -1.0)
        boundary[active] |= np.any(rel == 0.0, axis=1)
        digit = ((sgn[:, 0] > 0) * 2 + (sgn[:, 1] > 0)).astype(np.int64)
        cs[active] = cs[active] + sgn * source.R[k - 1]
        ct[active] = ct[active] + sgn * target.R[k - 1]
        frame_idx[active] = frame_idx[active] * 4 + digit
        rel = pts[active] - cs[active]
        rho = np.max(np.abs(rel), axis=1)
        in_frame = rho >= source.r[k - 1] * (1 - 1e-15)
        if in_frame.any():
            ids = np.flatnonzero(active)[in_frame]
            a = (target.R[k - 1] - target.r[k - 1]) / (source.R[k - 1] - source.r[k - 1])
            b = (
                source.R[k - 1] * target.r[k - 1] - target.R[k - 1] * source.r[k - 1]
            ) / (source.R[k - 1] - source.r[k - 1])
            rr = rho[in_frame]
            factor = (a * rr + b) / rr
            out[ids] = ct[ids] + factor[:, None] * (pts[ids] - cs[ids])
            frame_gen[ids] = k
            active[ids] = False
    # survivors of all K generations: map to the deepest target center
    surv = active
    out[surv] = ct[surv]
    frame_gen[surv] = -1  # cantor-limit marker
    return out, inside, frame_gen, frame_idx, boundary


def evaluate_h(points, source, target):
    """The tower homeomorphism at one or many points (identity outside
    [0,1]^2)."""
    pts = np.asarray(points, dtype=np.float64)
    out, *_ = _descend(pts, source, target)
    return out[0] if pts.ndim == 1 else out


def locate(x, tower):
    """('frame', k, i) | ('cantor', index) | ('exterior',), with a boundary
    flag; ties resolve to the lexicographically first quadrant."""
    _, inside, gen, idx, boundary = _descend(np.asarray(x, dtype=np.float64), tower, tower)
    if not inside[0]:
        return ("exterior",), False
    if gen[0] == -1:
        return ("cantor", int(idx[0])), bool(boundary[0])
    return ("frame", int(gen[0]), int(idx[0])), bool(boundary[0])


def frame_params(source, target, k, i):
    """Stretch parameters of the generation-k frame pair indexed by i."""
    if not 1 <= k <= source.depth:
        raise DomainRangeError("generation out of range")
    return RadialStretchParams(
        float(source.r[k - 1]),
        float(source.R[k - 1]),
        float(target.r[k - 1]),
        float(target.R[k - 1]),
        tuple(source.center_of(k, i)),
        tuple(target.center_of(k, i)),
    )


def generation_energy(k, source, target, samples_per_frame=4096):
    """Finite-difference energy of h over all 4^k generation-k frames.

    The frames of one generation are congruent translates, so one
    representative frame is sampled and scaled by 4^k.
    """
    if k > source.depth:
        raise PreconditionError("generation beyond tower depth")
    g = int(math.ceil(math.sqrt(samples_per_frame)))
    if g < 16:
        raise ResolutionError("need at least 16^2 samples per frame")
    r, R = source.r[k - 1], source.R[k - 1]
    rt, Rt = target.r[k - 1], target.R[k - 1]
    a = (Rt - rt) / (R - r)
    b = (R * rt - Rt * r) / (R - r)
    h = 2.0 * R / g
    ax = (np.arange(g) + 0.5) * h - R
    X, Y = np.meshgrid(ax, ax, indexing="ij")

    rho = np.maximum(np.abs(X), np.abs(Y))
    factor = np.where(rho > 0, (a * rho + b) / rho, 0.0)
    U = factor * X
    V = factor * Y

    in_annulus = (rho >= r) & (rho <= R)
    du_dx = (np.roll(U, -1, 0) - np.roll(U, 1, 0)) / (2 * h)
    du_dy = (np.roll(U, -1, 1) - np.roll(U, 1, 1)) / (2 * h)
    dv_dx = (np.roll(V, -1, 0) - np.roll(V, 1, 0)) / (2 * h)
    dv_dy = (np.roll(V, -1, 1) - np.roll(V, 1, 1)) / (2 * h)
    ok = in_annulus.copy()
    for sh, axis in (( -1, 0), (1, 0), (-1, 1), (1, 1)):
        ok &= np.roll(in_annulus, sh, axis)
    ok[[0, -1], :] = False
    ok[:, [0, -1]] = False
    df2 = du_dx**2 + du_dy**2 + dv_dx**2 + dv_dy**2
    per_frame = float(df2[ok].sum() * h * h)
    return 4.0**k * per_frame


def holder_exponent(sigma):
    """log 2 / log(1/sigma), the stretching exponent of the tower map."""
    return math.log(2.0) / math.log(1.0 / sigma)


def holder_ratio_sample(source, target, rng, pairs=100_000, norm="sup"):
    """Empirical sup of ||h(x)-h(y)|| / ||x-y||^beta over random pairs."""
    beta = holder_exponent(source.param)
    x = rng.uniform(0, 1, size=(pairs, 2))
    y = rng.uniform(0, 1, size=(pairs, 2))
    hx = evaluate_h(x, source, target)
    hy = evaluate_h(y, source, target)
    if norm == "sup":
        num = np.max(np.abs(hx - hy), axis=1)
        den = np.max(np.abs(x - y), axis=1)
    else:
        num = np.sqrt(((hx - hy) ** 2).sum(1))
        den = np.sqrt(((x - y) ** 2).sum(1))
    keep = den > 0
    return float(np.max(num[keep] / den[keep] ** beta))


def witness_positive_measure(target, p, K=None, gauge_exponent=None):
    """Mass-distribution evidence that the limit target set carries positive
    content for g(t) = t^2 (log 1/t)^(2p).

    Ratios use the sup-norm square side 2 r'_k as the declared diameter.
    Reports the per-generation ratios 4^-k / g(2 r'_k), their infimum, and a
    regression extrapolation of the k -> infinity limit (nominally 2^(2p)).
    """
    if p <= 0.5:
        raise PreconditionError("need p > 1/2")
    K = K if K is not None else target.depth
    q = gauge_exponent if gauge_exponent is not None else 2.0 * p
    ks = np.arange(1, K + 1, dtype=np.float64)
    sides = 2.0 * target.r[: int(K)]
    gvals = sides**2 * np.log(1.0 / sides) ** q
    ratios = 4.0 ** (-ks) / gvals

    from .gauges import Gauge

    gauge = Gauge(lambda t: t**2 * np.log(1.0 / t) ** q, f"t^2(log1/t)^{q:g}", t_cap=math.exp(-q / 2.0))
    tree = target.natural_tree()
    inf_all, per_level = mass_distribution_lower(tree, gauge)

    # model-free limit: 1/ratio^(1/q) is affine in log(k)/k and 1/k
    y = ratios ** (-1.0 / q)
    X = np.stack([np.ones_like(ks), np.log(ks) / ks, 1.0 / ks], axis=1)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    limit_extrapolated = float(coef[0] ** (-q))

    return {
        "p": p,
        "gauge_exponent": q,
        "ratios": ratios.tolist(),
        "inf_ratio_k3_on": float(ratios[2:].min()) if K >= 3 else None,
        "inf_ratio_tree": inf_all,
        "per_level_tree": per_level,
        "limit_extrapolated": limit_extrapolated,
        "limit_nominal": float(2.0 ** (2 * p)) if gauge_exponent is None else None,
    }


def tower_map_on_disk(sigma=0.25, p=1.0, depth=12, seed=20240601):
    """The tower map precomposed with the affine chart x -> (x+1)/2 of the
    unit disk, plus a measured power-law continuity certificate."""
    from .moduli import PowerModulus

    source = CantorTower("source", sigma, depth)
    target = CantorTower("target", p, depth)
    beta = holder_exponent(sigma)

    def fn(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        return evaluate_h((pts + 1.0) / 2.0, source, target)

    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, size=(4000, 2))
    y = rng.uniform(-1, 1, size=(4000, 2))
    fx, fy = fn(x), fn(y)
    num = np.sqrt(((fx - fy) ** 2).sum(1))
    den = np.sqrt(((x - y) ** 2).sum(1))
    keep = den > 0
    C_est = float(np.max(num[keep] / den[keep] ** beta)) * 1.25
    modulus = PowerModulus(C=C_est, gamma=beta, n=2)
    return fn, modulus
