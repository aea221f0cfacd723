"""Grid-sampled mappings of the unit ball: cube statistics and energy.

A ``SampledMap`` carries values on a uniform lattice (cell centers, spacing
``h``) and, for procedural built-ins, an exact evaluator that allows cube
statistics below the lattice resolution.  Gradients are central differences;
cells whose stencil leaves the closed ball form the boundary layer, are
excluded from energies and reported.

Cube statistics feed the ball families: for each Whitney cube Q the center
``f_Q`` is the average of f over Q and the radius ``r_Q`` the maximum of
|f_Q - f_Q'| over neighbor cubes Q'.
"""

import itertools
import math

import numpy as np

from .balls import SeedFamily, build_R_family, build_S_family
from .errors import ConfigError, DomainRangeError, ResolutionError

__all__ = [
    "SampledMap",
    "builtin_map",
    "map_from_csv",
    "cube_averages",
    "cube_average",
    "cube_radii",
    "cube_radius",
    "cube_energies",
    "dirichlet_energy",
    "assemble_family",
    "build_S_family",
    "build_R_family",
    "certificate_check",
    "neighbor_union_overlap",
    "poincare_ratio",
]


class SampledMap:
    def __init__(self, spacing, values, axes, n, m, exact_eval=None, modulus=None, label="map"):
        self.spacing = float(spacing)
        self.values = values  # shape (G1,..,Gn,m); NaN marks undefined nodes
        self.axes = axes  # list of n sorted coordinate arrays
        self.n = int(n)
        self.m = int(m)
        self.exact_eval = exact_eval
        self.modulus = modulus
        self.label = label

    @classmethod
    def from_function(cls, fn, spacing, n=2, m=None, modulus=None, label="map"):
        """Sample fn on cell centers of a [-1,1]^n lattice; keep fn for
        sub-resolution cube statistics."""
        N = round(1.0 / spacing)
        if abs(N * spacing - 1.0) > 1e-12:
            raise ConfigError("spacing must divide 1 (e.g. 1/256)")
        ax = (np.arange(-N, N) + 0.5) * spacing
        axes = [ax.copy() for _ in range(n)]
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        vals = np.asarray(fn(pts), dtype=np.float64)
        m = m if m is not None else vals.shape[1]
        values = vals.reshape(*(len(a) for a in axes), m)
        return cls(spacing, values, axes, n, m, exact_eval=fn, modulus=modulus, label=label)

    # --- node/coordinate bookkeeping -------------------------------------
    def index_range(self, lo, hi, axis):
        """Inclusive node-index range with coordinates in [lo, hi]."""
        a = self.axes[axis]
        off, h = a[0], self.spacing
        i0 = int(math.ceil((lo - off) / h - 1e-9))
        i1 = int(math.floor((hi - off) / h + 1e-9))
        return max(i0, 0), min(i1, len(a) - 1)

    def node_points(self):
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def inside_ball_mask(self):
        grids = np.meshgrid(*self.axes, indexing="ij")
        return sum(g**2 for g in grids) <= 1.0

    def evaluate(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if self.exact_eval is not None:
            return np.asarray(self.exact_eval(points), dtype=np.float64)
        idx = []
        for ax in range(self.n):
            a = self.axes[ax]
            j = np.clip(np.round((points[:, ax] - a[0]) / self.spacing).astype(int), 0, len(a) - 1)
            idx.append(j)
        return self.values[tuple(idx)]

    def boundary_value(self, omega):
        """f at a boundary point: exact when available, else the nearest
        interior node within 2 * spacing."""
        omega = np.asarray(omega, dtype=np.float64)
        if self.exact_eval is not None:
            return np.asarray(self.exact_eval(omega[None, :]))[0]
        inner = omega * (1.0 - self.spacing)
        val = self.evaluate(inner[None, :])[0]
        if np.any(np.isnan(val)):
            raise ResolutionError("no defined grid node within 2*spacing of the boundary point")
        return val


def _as_fn(vec):
    return lambda pts: vec(np.atleast_2d(np.asarray(pts, dtype=np.float64)))


def builtin_map(spec, spacing=1.0 / 256, n=2):
    """Procedural built-ins: identity | radial:a | sinwarp[:amp] | squarewarp[:amp]
    | peano | counterexample[:sigma,p,depth]."""
    name, _, args = spec.partition(":")
    vals = [float(x) for x in args.split(",")] if args else []
    if name == "identity":
        from .moduli import PowerModulus

        fn = _as_fn(lambda p: p)
        return SampledMap.from_function(
            fn, spacing, n=n, modulus=PowerModulus(C=1, gamma=1.0, beta=2.1), label="identity"
        )
    if name == "radial":
        a = vals[0] if vals else 0.5

        def fn(pts):
            pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
            r = np.sqrt((pts**2).sum(1, keepdims=True))
            with np.errstate(divide="ignore", invalid="ignore"):
                out = pts * np.where(r > 0, r ** (a - 1.0), 0.0)
            return np.where(r > 0, out, 0.0)

        return SampledMap.from_function(fn, spacing, n=n, label=f"radial:{a:g}")
    if name == "sinwarp":
        amp = vals[0] if vals else 0.1

        def fn(pts):
            pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
            out = pts.copy()
            out[:, 0] += amp * np.sin(np.pi * pts[:, 1 % pts.shape[1]])
            out[:, 1 % pts.shape[1]] += amp * np.sin(np.pi * pts[:, 0])
            return out

        return SampledMap.from_function(fn, spacing, n=n, label=f"sinwarp:{amp:g}")
    if name == "squarewarp":
        amp = vals[0] if vals else 0.25

        def fn(pts):
            pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
            out = pts.copy()
            out[:, 0] += amp * (pts[:, 0] ** 2 - pts[:, 1 % pts.shape[1]] ** 2)
            out[:, 1 % pts.shape[1]] += amp * 2 * pts[:, 0] * pts[:, 1 % pts.shape[1]]
            return out

        return SampledMap.from_function(fn, spacing, n=n, label=f"squarewarp:{amp:g}")
    if name == "peano":
        fn = _peano_extension()
        return SampledMap.from_function(fn, spacing, n=2, label="peano")
    if name == "counterexample":
        from .counterexample import tower_map_on_disk

        sigma = vals[0] if vals else 0.25
        p = vals[1] if len(vals) > 1 else 1.0
        depth = int(vals[2]) if len(vals) > 2 else 12
        fn, modulus = tower_map_on_disk(sigma, p, depth)
        return SampledMap.from_function(
            fn, spacing, n=2, modulus=modulus, label=f"counterexample:{sigma:g},{p:g},{depth}"
        )
    raise ConfigError(f"unknown built-in map {spec!r}")


def _hilbert_points(order):
    """Vertex sequence of the order-n Hilbert curve on [0,1]^2."""
    pts = np.array([[0.25, 0.25], [0.25, 0.75], [0.75, 0.75], [0.75, 0.25]])
    for _ in range(order - 1):
        a = pts * 0.5
        q1 = a[:, ::-1]
        q2 = a + [0.0, 0.5]
        q3 = a + [0.5, 0.5]
        q4 = np.stack([1.0 - a[:, 1], 0.5 - a[:, 0]], axis=1)
        pts = np.concatenate([q1, q2, q3, q4])
    return pts


def _peano_extension(order=6):
    """Radial interpolation between the disk center and a space-filling-type
    boundary curve: a rough-boundary demonstration map."""
    curve = _hilbert_points(order)
    M = len(curve)

    def fn(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        r = np.sqrt((pts**2).sum(1))
        theta = np.mod(np.arctan2(pts[:, 1], pts[:, 0]) / (2 * np.pi), 1.0)
        u = theta * M
        j = np.minimum(u.astype(int), M - 1)
        frac = u - j
        bnd = curve[j] * (1 - frac[:, None]) + curve[(j + 1) % M] * frac[:, None]
        center = np.array([0.5, 0.5])
        return center + np.clip(r, 0, 1)[:, None] * (bnd - center)

    return fn


def map_from_csv(path, n=2, m=2, modulus=None, label=None):
    """Load 'x1,..,xn,f1,..,fm' rows sampled on a uniform lattice."""
    data = np.genfromtxt(path, delimiter=",", skip_header=0)
    if data.ndim != 2 or data.shape[1] != n + m:
        raise ConfigError(f"expected {n + m} columns, found {data.shape}")
    coords, vals = data[:, :n], data[:, n:]
    axes = []
    for ax in range(n):
        u = np.unique(coords[:, ax])
        d = np.diff(u)
        if len(u) < 2 or np.any(np.abs(d - d[0]) > 1e-9 * abs(d[0])):
            raise ConfigError(f"axis {ax} is not a uniform lattice")
        axes.append(u)
    h = float(np.diff(axes[0])[0])
    shape = tuple(len(a) for a in axes) + (m,)
    values = np.full(shape, np.nan)
    idx = tuple(
        np.round((coords[:, ax] - axes[ax][0]) / h).astype(int) for ax in range(n)
    )
    values[idx] = vals
    return SampledMap(h, values, axes, n, m, label=label or str(path))


# --------------------------------------------------------------------------
# cube statistics
# --------------------------------------------------------------------------


def cube_averages(f, dec):
    """Average of f over every cube of the decomposition, (N, m) array."""
    return cube_averages_arrays(f, dec.levels, dec.corners)


def cube_averages_arrays(f, levels, corners):
    """Average of f over each dyadic cube (levels[i], corners[i]).

    Uses grid nodes (midpoint samples) when the cube holds at least 2^n of
    them, all carrying values; otherwise falls back to the exact evaluator
    on the 2^n quadrant midpoints, and raises ResolutionError when neither
    is possible.
    """

    class _CubeView:
        pass

    dec = _CubeView()
    dec.levels = np.asarray(levels, dtype=np.int32)
    dec.corners = np.asarray(corners, dtype=np.int64).reshape(len(dec.levels), f.n)
    N = len(dec.levels)
    out = np.full((N, f.m), np.nan)
    sat = _sat(f.values) if f.values is not None else None
    valid_sat = (
        _sat((~np.isnan(f.values).any(axis=-1)).astype(np.float64)[..., None])
        if f.values is not None
        else None
    )
    for k in np.unique(dec.levels):
        sel = np.flatnonzero(dec.levels == k)
        side = 2.0 ** (-float(k))
        lo = dec.corners[sel] * side
        ranges = []
        ok = np.ones(len(sel), dtype=bool)
        full_counts = np.ones(len(sel))
        for ax in range(f.n):
            a = f.axes[ax]
            i0 = np.ceil((lo[:, ax] - a[0]) / f.spacing - 1e-9).astype(int)
            i1 = np.floor((lo[:, ax] + side - a[0]) / f.spacing + 1e-9).astype(int)
            inb = (i0 >= 0) & (i1 <= len(a) - 1)
            i0c = np.clip(i0, 0, len(a) - 1)
            i1c = np.clip(i1, 0, len(a) - 1)
            ok &= inb & ((i1c - i0c) >= 1)
            full_counts *= np.maximum(i1c - i0c + 1, 1)
            ranges.append((i0c, i1c))
        if ok.any() and sat is not None:
            n_valid = _sat_box_sum(valid_sat, ranges, ok)[:, 0]
            all_defined = n_valid >= full_counts[ok] - 0.5
            ok2 = ok.copy()
            ok2[np.flatnonzero(ok)[~all_defined]] = False
            if ok2.any():
                sums = _sat_box_sum(sat, ranges, ok2)
                counts = np.ones(int(ok2.sum()))
                for i0, i1 in ranges:
                    counts = counts * (i1[ok2] - i0[ok2] + 1)
                out[sel[ok2]] = sums / counts[:, None]
            ok = ok2
        elif sat is None:
            ok[:] = False
        rest = ~ok
        if rest.any():
            if f.exact_eval is None:
                raise ResolutionError(
                    f"{int(rest.sum())} cubes at level {k} hold fewer than 2^n usable grid nodes"
                )
            centers = lo[rest] + side / 2.0
            offs = np.array(list(itertools.product((-0.25, 0.25), repeat=f.n))) * side
            pts = (centers[:, None, :] + offs[None, :, :]).reshape(-1, f.n)
            vals = np.asarray(f.exact_eval(pts), dtype=np.float64).reshape(len(centers), len(offs), f.m)
            out[sel[rest]] = vals.mean(axis=1)
    return out


def cube_average(f, cube):
    """Average of f over a single dyadic cube (not necessarily in a
    decomposition)."""
    return cube_averages_arrays(f, [cube.level], [cube.corner])[0]


def cube_radii(f, dec, averages=None):
    """r_Q = max over neighbors of |f_Q - f_Q'| (euclidean in the image)."""
    fq = cube_averages(f, dec) if averages is None else averages
    starts, flat = dec.adjacency
    src = np.repeat(np.arange(len(dec)), np.diff(starts))
    d = np.sqrt(((fq[src] - fq[flat]) ** 2).sum(axis=1))
    r = np.zeros(len(dec))
    np.maximum.at(r, src, d)
    return r


def cube_radius(f, dec, cube):
    return float(cube_radii(f, dec)[dec.index_of(cube)])


# --------------------------------------------------------------------------
# energies
# --------------------------------------------------------------------------


def _sat(values):
    """Summed-area table with a zero border; NaN treated as missing (0)."""
    if values is None:
        return None
    v = np.nan_to_num(values, nan=0.0)
    for ax in range(values.ndim - 1):
        v = np.cumsum(v, axis=ax)
    pad = [(1, 0)] * (values.ndim - 1) + [(0, 0)]
    return np.pad(v, pad)


def _sat_box_sum(sat, ranges, ok):
    """Inclusive box sums over index ranges, inclusion-exclusion on the SAT."""
    n = len(ranges)
    total = None
    for signs in itertools.product((0, 1), repeat=n):
        idx = tuple(
            (r[1][ok] + 1) if s == 0 else r[0][ok] for (r, s) in zip(ranges, signs)
        )
        term = sat[idx]
        sign = (-1) ** sum(signs)
        total = sign * term if total is None else total + sign * term
    return total


class EnergyResult(float):
    """Float with attached cell bookkeeping."""

    def __new__(cls, value, cells_used, cells_excluded):
        obj = super().__new__(cls, value)
        obj.cells_used = cells_used
        obj.cells_excluded = cells_excluded
        return obj


def gradient_field(f):
    """|Df|^n per cell (Frobenius norm), with the valid-stencil mask.

    Central differences; a cell is valid when both stencil neighbors per
    axis exist, carry values and lie in the closed unit ball.
    """
    if f.values is None:
        raise ResolutionError("map carries no lattice values")
    v = f.values
    h = f.spacing
    grids = np.meshgrid(*f.axes, indexing="ij")
    norm2 = sum(g**2 for g in grids)
    inside = norm2 <= 1.0
    valid = np.ones(v.shape[:-1], dtype=bool)
    df2 = np.zeros(v.shape[:-1])
    for ax in range(f.n):
        plus = np.roll(v, -1, axis=ax)
        minus = np.roll(v, 1, axis=ax)
        d = (plus - minus) / (2 * h)
        df2 = df2 + (d**2).sum(axis=-1)
        ok = np.ones_like(valid)
        sl_lo = [slice(None)] * f.n
        sl_hi = [slice(None)] * f.n
        sl_lo[ax] = slice(0, 1)
        sl_hi[ax] = slice(-1, None)
        ok[tuple(sl_lo)] = False
        ok[tuple(sl_hi)] = False
        ok &= np.roll(inside, -1, axis=ax) & np.roll(inside, 1, axis=ax)
        ok &= ~np.isnan(plus).any(axis=-1) & ~np.isnan(minus).any(axis=-1)
        valid &= ok
    valid &= inside
    field = np.where(valid, df2 ** (f.n / 2.0), 0.0)
    return field, valid, inside


def dirichlet_energy(f, region="ball"):
    """Midpoint-rule integral of |Df|^n over the region.

    ``region``: 'ball' for the whole unit ball, ('annulus', delta) for
    ball minus B(0, 1-delta), or a boolean predicate on cell centers.
    Boundary-layer cells (invalid stencil) are excluded and counted.
    """
    field, valid, inside = gradient_field(f)
    grids = np.meshgrid(*f.axes, indexing="ij")
    if region == "ball":
        want = inside
    elif isinstance(region, tuple) and region[0] == "annulus":
        delta = float(region[1])
        norm2 = sum(g**2 for g in grids)
        want = inside & (norm2 > (1.0 - delta) ** 2)
    elif callable(region):
        pts = np.stack([g.ravel() for g in grids], axis=1)
        want = np.asarray(region(pts), dtype=bool).reshape(inside.shape) & inside
    else:
        raise ConfigError(f"unknown region {region!r}")
    used = want & valid
    value = float(field[used].sum() * f.spacing**f.n)
    return EnergyResult(value, int(used.sum()), int((want & ~valid).sum()))


def cube_energies(f, dec):
    """Integral of |Df|^n over each cube (boundary-layer cells excluded)."""
    field, valid, _ = gradient_field(f)
    sat = _sat(field[..., None])
    out = np.zeros(len(dec))
    for k in np.unique(dec.levels):
        sel = np.flatnonzero(dec.levels == k)
        side = 2.0 ** (-float(k))
        lo = dec.corners[sel] * side
        ranges = []
        nonempty = np.ones(len(sel), dtype=bool)
        for ax in range(f.n):
            a = f.axes[ax]
            i0 = np.ceil((lo[:, ax] - a[0]) / f.spacing - 1e-9).astype(int)
            i1 = np.floor((lo[:, ax] + side - a[0]) / f.spacing + 1e-9).astype(int)
            nonempty &= i1 >= i0
            ranges.append((np.clip(i0, 0, len(a) - 1), np.clip(i1, 0, len(a) - 1)))
        if nonempty.any():
            sums = _sat_box_sum(sat, ranges, nonempty)[:, 0]
            out[sel[nonempty]] = sums * f.spacing**f.n
    return out


# --------------------------------------------------------------------------
# family assembly and discrete inequalities
# --------------------------------------------------------------------------


def assemble_family(f, dec, modulus, k_floor=0, c0_hint=16.0, tail_rel=None):
    """Seed balls (f_Q, r_Q) for all cubes with r_Q > 0 plus their attached
    weighted families, in closed form.  A constant map yields the empty
    family."""
    fq = cube_averages(f, dec)
    rq = cube_radii(f, dec, fq)
    keep = rq > 0
    return SeedFamily(
        fq[keep], rq[keep], modulus, dec.n,
        k_floor=k_floor, tail_rel=tail_rel, c0_hint=c0_hint,
    ), np.flatnonzero(keep)


def certificate_check(f, rng, pairs=10_000, slack=1e-6):
    """Sampled verification of |f(z)-f(w)| <= psi(|z-w|) for the attached
    modulus; returns the worst ratio (must be <= 1 + slack)."""
    if f.modulus is None:
        raise ConfigError("map carries no modulus certificate")
    pts = f.node_points()
    mask = (pts**2).sum(1) <= 1.0
    pts = pts[mask]
    i = rng.integers(0, len(pts), size=pairs)
    j = rng.integers(0, len(pts), size=pairs)
    keep = i != j
    i, j = i[keep], j[keep]
    z, w = pts[i], pts[j]
    fz = f.evaluate(z)
    fw = f.evaluate(w)
    lhs = np.sqrt(((fz - fw) ** 2).sum(1))
    rhs = f.modulus.psi(np.sqrt(((z - w) ** 2).sum(1)))
    ratio = float(np.max(lhs / rhs))
    return ratio, bool(ratio <= 1.0 + slack)


def neighbor_union_overlap(dec):
    """max over points y of the number of cubes Q with y in N(Q).

    A cell center lies in exactly one cube, so the count equals
    1 + degree of that cube in the neighbor graph.
    """
    return 1 + dec.max_neighbor_count()


def poincare_ratio(f, dec):
    """max over cubes of r_Q^n / integral_{N(Q)} |Df|^n (the discrete
    oscillation inequality constant on this map)."""
    fq = cube_averages(f, dec)
    rq = cube_radii(f, dec, fq)
    eq = cube_energies(f, dec)
    starts, flat = dec.adjacency
    src = np.repeat(np.arange(len(dec)), np.diff(starts))
    union = eq.copy()
    np.add.at(union, src, eq[flat])
    ok = (union > 0) & (rq > 0)
    if not ok.any():
        return 0.0
    return float(np.max(rq[ok] ** dec.n / union[ok]))
