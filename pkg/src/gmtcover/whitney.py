"""Dyadic Whitney decompositions of open sets, neighbor graphs, radial chains.

A Whitney family here is the set of maximal dyadic cubes Q satisfying
``diam(Q) <= dist(Q, boundary)``.  Maximality (the parent cube fails the
inequality) forces ``dist(Q, boundary) < 4*diam(Q)``, so every emitted cube
satisfies

    1/4 <= diam(Q) / dist(Q, boundary) <= 1.

The unit ball and the unit box get exact closed-form cube-to-boundary
distances; other open sets are supported through a user-supplied distance
function.  The family is truncated at ``max_level``: points closer to the
boundary than about ``2*sqrt(n)*2^-max_level`` sit in the unresolved collar
and are not covered.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainRangeError, PreconditionError


@dataclass(frozen=True)
class DyadicCube:
    """Closed cube [corner * 2^-level, (corner+1) * 2^-level] per axis."""

    level: int
    corner: tuple

    @property
    def dim(self):
        return len(self.corner)

    @property
    def side(self):
        return 2.0 ** (-self.level)

    @property
    def diam(self):
        return np.sqrt(self.dim) * self.side

    @property
    def lo(self):
        return np.array(self.corner, dtype=np.float64) * self.side

    @property
    def hi(self):
        return (np.array(self.corner, dtype=np.float64) + 1) * self.side

    @property
    def center(self):
        return (np.array(self.corner, dtype=np.float64) + 0.5) * self.side

    def contains(self, x, tol=0.0):
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))


class UnitBall:
    """Open unit ball centered at the origin."""

    kind = "ball"

    def __init__(self, n=2):
        if n not in (2, 3):
            raise DomainRangeError(f"supported dimensions are 2 and 3, got {n}")
        self.n = n

    def point_dist(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return 1.0 - np.sqrt((x**2).sum(axis=1))

    def cube_dist(self, lo, hi):
        far = np.maximum(np.abs(lo), np.abs(hi))
        return 1.0 - np.sqrt((far**2).sum(axis=-1))


class UnitBox:
    """Open unit box (0,1)^n."""

    kind = "box"

    def __init__(self, n=2):
        if n not in (2, 3):
            raise DomainRangeError(f"supported dimensions are 2 and 3, got {n}")
        self.n = n

    def point_dist(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return np.minimum(x, 1.0 - x).min(axis=1)

    def cube_dist(self, lo, hi):
        return np.minimum(lo, 1.0 - hi).min(axis=-1)


class FromDistance:
    """Open set given by a 1-Lipschitz distance function (positive inside).

    ``cube_dist(lo, hi)``, when provided, must return the exact distance from
    the closed cube to the boundary; otherwise a conservative center-based
    bound is used and the decomposition is approximate near ties.
    """

    kind = "custom"

    def __init__(self, n, point_dist, bounding_corners, cube_dist=None):
        self.n = n
        self._point_dist = point_dist
        self._cube_dist = cube_dist
        self.bounding_corners = bounding_corners  # level-0 integer corners to start from

    def point_dist(self, x):
        return np.asarray(self._point_dist(np.atleast_2d(np.asarray(x, dtype=np.float64))))

    def cube_dist(self, lo, hi):
        if self._cube_dist is not None:
            return np.asarray(self._cube_dist(lo, hi))
        center = (np.asarray(lo) + np.asarray(hi)) / 2.0
        half_diag = np.sqrt(self.n) * (np.asarray(hi) - np.asarray(lo))[..., 0] / 2.0
        return self.point_dist(center) - half_diag


class RadialChain:
    """Whitney cubes meeting the segment [0, omega], in traversal order.

    ``t_in[j]`` is the first contact parameter of cube j with the ray; ties
    (face or corner contacts) keep every touched cube, ordered by
    (t_in, level, corner).
    """

    def __init__(self, decomposition, omega, indices, t_in):
        self.decomposition = decomposition
        self.omega = np.asarray(omega, dtype=np.float64)
        self.indices = indices
        self.t_in = t_in

    def __len__(self):
        return len(self.indices)

    @property
    def levels(self):
        return self.decomposition.levels[self.indices]

    def count_upto(self, t):
        """Number of chain cubes meeting [0, t*omega]."""
        return int(np.searchsorted(self.t_in, t, side="right"))

    def prefix_ratio(self, t):
        """count_upto(t) / log(1/(1-t)); the chain-count comparison statistic."""
        if not 0 < t < 1:
            raise DomainRangeError("t must be in (0,1)")
        return self.count_upto(t) / np.log(1.0 / (1.0 - t))


class WhitneyDecomposition:
    """Immutable Whitney family with lazy neighbor graph and lookup tables."""

    def __init__(self, domain, max_level, levels, corners):
        self.domain = domain
        self.n = domain.n
        self.max_level = max_level
        self.levels = levels
        self.corners = corners
        self._tables = _kernels.build_tables(levels, corners)
        self._adj = None

    def __len__(self):
        return len(self.levels)

    # --- cube views -----------------------------------------------------

    def cube(self, i):
        return DyadicCube(int(self.levels[i]), tuple(int(c) for c in self.corners[i]))

    def index_of(self, cube):
        cand = np.array([cube.corner], dtype=np.int64)
        idx = _kernels.lookup(self._tables, cube.level, cand)[0]
        if idx < 0:
            raise KeyError(f"cube {cube} not in decomposition")
        return int(idx)

    def __contains__(self, cube):
        try:
            self.index_of(cube)
            return True
        except KeyError:
            return False

    def sides(self):
        return 2.0 ** (-self.levels.astype(np.float64))

    def diams(self):
        return np.sqrt(self.n) * self.sides()

    def boundary_dists(self):
        s = self.sides()
        lo = self.corners * s[:, None]
        hi = (self.corners + 1) * s[:, None]
        return self.domain.cube_dist(lo, hi)

    def centers(self):
        return (self.corners + 0.5) * self.sides()[:, None]

    # --- neighbor graph -------------------------------------------------

    def _build_adjacency(self):
        a, b = _kernels.neighbor_pairs(self.levels, self.corners)
        src = np.concatenate([a, b])
        dst = np.concatenate([b, a])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        counts = np.bincount(src, minlength=len(self))
        starts = np.concatenate([[0], np.cumsum(counts)])
        self._adj = (starts, dst)

    @property
    def adjacency(self):
        """CSR adjacency: (starts, flat neighbor indices)."""
        if self._adj is None:
            self._build_adjacency()
        return self._adj

    def neighbor_indices(self, i):
        starts, flat = self.adjacency
        return flat[starts[i] : starts[i + 1]]

    def neighbors(self, cube):
        """All cubes sharing at least one point with the given cube."""
        i = self.index_of(cube)
        return [self.cube(j) for j in self.neighbor_indices(i)]

    def max_neighbor_count(self):
        starts, _ = self.adjacency
        return int(np.diff(starts).max()) if len(self) else 0

    # --- point location and chains --------------------------------------

    def locate(self, x):
        """Indices of all cubes whose closed box contains x."""
        x = np.asarray(x, dtype=np.float64)
        hits = []
        for k in self._tables:
            s = float(1 << k)
            p = x * s
            choices = []
            for i in range(self.n):
                v = np.round(p[i])
                if abs(p[i] - v) <= 1e-9 * max(1.0, abs(p[i])):
                    choices.append((int(v) - 1, int(v)))
                else:
                    choices.append((int(np.floor(p[i])),))
            cells = np.array(np.meshgrid(*choices, indexing="ij")).reshape(self.n, -1).T
            idx = _kernels.lookup(self._tables, k, np.ascontiguousarray(cells))
            hits.extend(int(j) for j in idx if j >= 0)
        return sorted(hits)

    def radial_chain(self, omega, tmax=1.0):
        """Ordered chain of cubes intersecting the radius [0, omega]."""
        omega = np.asarray(omega, dtype=np.float64)
        if abs(np.linalg.norm(omega) - 1.0) > 1e-12:
            raise PreconditionError("omega must be a unit vector")
        all_idx, all_tin = [], []
        for k in self._tables:
            cells = _kernels.supercover_cells(omega, k, tmax)
            idx = _kernels.lookup(self._tables, k, cells)
            ok = idx >= 0
            if not ok.any():
                continue
            idx = idx[ok]
            cells = cells[ok]
            s = 2.0 ** (-k)
            lo = cells * s
            hi = (cells + 1) * s
            t_in = np.zeros(len(idx))
            for i in range(self.n):
                w = omega[i]
                if w == 0.0:
                    continue
                t0 = np.minimum(lo[:, i] / w, hi[:, i] / w)
                t_in = np.maximum(t_in, t0)
            all_idx.append(idx)
            all_tin.append(np.maximum(t_in, 0.0))
        if not all_idx:
            return RadialChain(self, omega, np.zeros(0, dtype=np.int64), np.zeros(0))
        idx = np.concatenate(all_idx)
        t_in = np.concatenate(all_tin)
        corner_cols = tuple(self.corners[idx][:, i] for i in range(self.n - 1, -1, -1))
        order = np.lexsort(corner_cols + (self.levels[idx], t_in))
        return RadialChain(self, omega, idx[order], t_in[order])

    # --- export ----------------------------------------------------------

    def to_records(self):
        """JSON-ready cube list."""
        diams = self.diams()
        dists = self.boundary_dists()
        return [
            {
                "level": int(self.levels[i]),
                "corner": [int(c) for c in self.corners[i]],
                "diam": float(diams[i]),
                "dist_to_boundary": float(dists[i]),
            }
            for i in range(len(self))
        ]


def decompose(domain, max_level):
    """Whitney decomposition of the domain, truncated at max_level."""
    n = domain.n
    if max_level > _kernels.MAX_LEVEL.get(n, 0):
        raise DomainRangeError(
            f"max_level {max_level} exceeds supported depth {_kernels.MAX_LEVEL.get(n)} for n={n}"
        )
    if domain.kind == "ball":
        levels, corners = _kernels.whitney_cubes(_kernels.DOMAIN_BALL, n, max_level)
    elif domain.kind == "box":
        levels, corners = _kernels.whitney_cubes(_kernels.DOMAIN_BOX, n, max_level)
    else:
        levels, corners = _decompose_generic(domain, max_level)
    return WhitneyDecomposition(domain, max_level, levels, corners)


def _decompose_generic(domain, max_level):
    """Top-down refinement against a cube-to-boundary distance callable."""
    import itertools

    n = domain.n
    cur = np.array(domain.bounding_corners, dtype=np.int64).reshape(-1, n)
    child = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
    out_levels, out_corners = [], []
    for k in range(max_level + 1):
        if len(cur) == 0:
            break
        s = 2.0 ** (-k)
        lo = cur * s
        hi = (cur + 1) * s
        dist = np.asarray(domain.cube_dist(lo, hi), dtype=np.float64)
        diam = np.sqrt(n) * s
        keep = diam <= dist
        # a cube is recursed into unless it is provably outside the closure
        centers = (lo + hi) / 2.0
        half_diag = diam / 2.0
        outside = np.asarray(domain.point_dist(centers)) <= -half_diag
        out_levels.append(np.full(int(keep.sum()), k, dtype=np.int32))
        out_corners.append(cur[keep])
        if k == max_level:
            break
        rec = ~keep & ~outside
        cur = (cur[rec, None, :] * 2 + child[None, :, :]).reshape(-1, n)
    levels = np.concatenate(out_levels) if out_levels else np.zeros(0, dtype=np.int32)
    corners = np.concatenate(out_corners) if out_corners else np.zeros((0, n), dtype=np.int64)
    order = np.lexsort(tuple(corners[:, i] for i in range(n - 1, -1, -1)) + (levels,))
    return levels[order], np.ascontiguousarray(corners[order])


def verify_geometry(dec, exact=True):
    """Check the defining inequality and neighbor bounds; returns a report.

    For the ball the ratio bounds reduce to integer comparisons:
    ``diam <= dist`` is ``4*n*S <= (4^k - n - S)^2`` with
    ``S = sum(max(|c|,|c+1|)^2)``, and ``dist <= 4*diam`` is the analogous
    squared form of ``2^k <= sqrt(S) + 4*sqrt(n)``.  These are evaluated in
    exact integer arithmetic when ``exact`` is set.
    """
    n = dec.n
    levels = dec.levels.astype(np.int64)
    corners = dec.corners
    report = {"cubes": len(dec), "dim": n}
    if dec.domain.kind == "ball" and exact:
        lo = corners
        hi = corners + 1
        far = np.maximum(np.abs(lo), np.abs(hi))
        if levels.size and levels.max() <= 14:
            S = (far.astype(np.int64) ** 2).sum(1)
            T2 = np.int64(1) << (2 * levels)  # 4^k
        else:  # python ints avoid overflow past depth 14
            S = np.array([sum(int(v) ** 2 for v in row) for row in far], dtype=object)
            T2 = np.array([(1 << (2 * int(k))) for k in levels], dtype=object)
        upper_ok = (T2 - n - S >= 0) & (4 * n * S <= (T2 - n - S) ** 2)
        # dist <= 4 diam  <=>  2^k <= sqrt(S) + 4 sqrt(n)  <=>  (4^k - S - 16n)^2 <= 64 n S  (when lhs >= 0)
        t = T2 - S - 16 * n
        lower_ok = (t <= 0) | (t**2 <= 64 * n * S)
        report["ratio_upper_exact"] = bool(np.all(upper_ok))
        report["ratio_lower_exact"] = bool(np.all(lower_ok))
    diams = dec.diams()
    dists = dec.boundary_dists()
    ratios = diams / dists
    report["ratio_min"] = float(ratios.min()) if len(dec) else None
    report["ratio_max"] = float(ratios.max()) if len(dec) else None
    report["ratio_in_band"] = bool(np.all((ratios >= 0.25 - 1e-12) & (ratios <= 1.0 + 1e-12)))
    a, b = _kernels.neighbor_pairs(dec.levels, dec.corners)
    dl = np.abs(dec.levels[a].astype(np.int64) - dec.levels[b].astype(np.int64))
    report["neighbor_pairs"] = int(len(a))
    report["neighbor_level_diff_max"] = int(dl.max()) if len(a) else 0
    report["neighbor_ratio_in_band"] = bool(np.all(dl <= 2))
    report["neighbor_count_max"] = dec.max_neighbor_count()
    return report


def coverage_check(dec, rng, samples=2000):
    """Sampled coverage: points with dist >= 2*sqrt(n)*2^-max_level lie in a cube."""
    n = dec.n
    pts = rng.uniform(-1.0, 1.0, size=(samples * 3, n))
    d = dec.domain.point_dist(pts)
    margin = 2.0 * np.sqrt(n) * 2.0 ** (-dec.max_level)
    pts = pts[d >= margin][:samples]
    misses = [p for p in pts if not dec.locate(p)]
    return {"tested": len(pts), "missed": len(misses), "miss_examples": misses[:3]}
