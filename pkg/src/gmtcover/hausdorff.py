"""Generalized Hausdorff content: upper bounds from covers, weighted covers,
box counting, and mass-distribution lower bounds.

All sets are finite point samples; "measure zero" statements are rendered as
cover-value curves tending to zero, never as exact zeros.  Diameters are
exact for balls and l2-diagonals for axis boxes.
"""

import numpy as np

from . import _kernels
from .errors import CoverInvalidError, DomainRangeError, TreeInvalidError

BALL = "ball"
BOX = "box"


class PointCloud:
    """Finite sample of a target set, deduplicated within 1e-12."""

    def __init__(self, points, description=""):
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        q = np.round(pts / 1e-12) * 1e-12
        _, keep = np.unique(q, axis=0, return_index=True)
        self.points = pts[np.sort(keep)]
        self.description = description

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return self.points.shape[1]


class Cover:
    """Plain cover: sets with diameters, all at most ``delta``.

    ``kind`` is 'ball' (locator = (center, radius)) or 'box'
    (locator = (lo, hi) corners).
    """

    def __init__(self, kind, locators_a, locators_b, delta=None):
        self.kind = kind
        self.a = np.atleast_2d(np.asarray(locators_a, dtype=np.float64))
        if kind == BALL:
            self.b = np.asarray(locators_b, dtype=np.float64).reshape(-1)
        else:
            self.b = np.atleast_2d(np.asarray(locators_b, dtype=np.float64))
        d = self.diameters()
        self.delta = float(delta) if delta is not None else float(d.max()) if len(d) else 0.0
        if len(d) and d.max() > self.delta * (1 + 1e-12):
            raise DomainRangeError("a cover set exceeds the declared max diameter")

    def __len__(self):
        return len(self.a)

    @classmethod
    def of_balls(cls, centers, radii, delta=None):
        return cls(BALL, centers, radii, delta)

    @classmethod
    def of_boxes(cls, lo, hi, delta=None):
        return cls(BOX, lo, hi, delta)

    def diameters(self):
        if self.kind == BALL:
            return 2.0 * self.b
        return np.sqrt(((self.b - self.a) ** 2).sum(axis=1))

    def contains(self, points):
        """(n_points, n_sets) boolean containment (closed sets)."""
        pts = np.atleast_2d(points)
        if self.kind == BALL:
            d2 = ((pts[:, None, :] - self.a[None, :, :]) ** 2).sum(axis=2)
            return d2 <= (self.b**2)[None, :] * (1 + 1e-12)
        lo_ok = pts[:, None, :] >= self.a[None, :, :] - 1e-12
        hi_ok = pts[:, None, :] <= self.b[None, :, :] + 1e-12
        return (lo_ok & hi_ok).all(axis=2)


class WeightedCover:
    """Pairs (c_i, U_i) meant to satisfy sum c_i chi_{U_i} >= 1 on the target."""

    def __init__(self, coefficients, cover):
        self.coefficients = np.asarray(coefficients, dtype=np.float64).reshape(-1)
        self.cover = cover
        if np.any(self.coefficients < 0):
            raise DomainRangeError("weighted-cover coefficients must be non-negative")
        if len(self.coefficients) != len(cover):
            raise DomainRangeError("coefficient/set count mismatch")

    def __len__(self):
        return len(self.coefficients)

    @classmethod
    def of_balls(cls, coefficients, centers, radii):
        return cls(coefficients, Cover.of_balls(centers, radii))

    def multiplicities(self, points, chunked=True):
        """sum of c_i over sets containing each point."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if self.cover.kind == BALL and chunked:
            return _kernels.weighted_containment(
                self.cover.a, self.cover.b * (1 + 1e-12), self.coefficients, pts
            )
        return self.cover.contains(pts) @ self.coefficients

    def value(self, gauge):
        return float(np.sum(self.coefficients * gauge(self.cover.diameters())))

    def prune_greedy(self, points):
        """Heuristic: drop pairs never needed to keep multiplicity >= 1.

        Greedily keeps high-coefficient sets until every point reaches
        multiplicity 1; an optimization pass, not an infimum solver.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        contains = self.cover.contains(pts)
        order = np.argsort(-self.coefficients, kind="stable")
        need = np.ones(len(pts))
        chosen = []
        for i in order:
            hit = contains[:, i] & (need > 1e-12)
            if hit.any():
                chosen.append(i)
                need[contains[:, i]] -= self.coefficients[i]
            if np.all(need <= 1e-12):
                break
        chosen = np.sort(np.array(chosen, dtype=int))
        sub = Cover(
            self.cover.kind,
            self.cover.a[chosen],
            self.cover.b[chosen],
            self.cover.delta,
        )
        return WeightedCover(self.coefficients[chosen], sub)


def content_upper(cloud, cover, gauge):
    """sum of h(diam U_i): an upper bound for the delta-content of the sample.

    Raises CoverInvalidError naming a missed point when the cover fails.
    """
    if len(cloud):
        counts = cover.contains(cloud.points).sum(axis=1)
        if counts.min() < 1:
            miss = cloud.points[int(np.argmin(counts))]
            raise CoverInvalidError("cover misses a target point", point=tuple(miss))
    return float(np.sum(gauge(cover.diameters())))


def weighted_content_upper(cloud, wcover, gauge, multiplicity_tol=1e-9):
    """sum of c_i h(diam U_i) for a verified weighted cover.

    Returns (value, howroyd_bound) where the second entry multiplies by the
    gauge's doubling constant and bounds the plain (unweighted) content.
    """
    if len(cloud):
        mult = wcover.multiplicities(cloud.points)
        if mult.min() < 1.0 - multiplicity_tol:
            i = int(np.argmin(mult))
            raise CoverInvalidError(
                "weighted cover multiplicity below 1",
                point=tuple(cloud.points[i]),
                deficit=float(1.0 - mult[i]),
            )
    value = wcover.value(gauge)
    return value, gauge.doubling_constant * value


def box_count(cloud, delta, gauge):
    """Occupied delta-mesh boxes count times h(delta * sqrt(dim)).

    An upper bound for the content at scale delta * sqrt(dim).
    """
    if delta <= 0:
        raise DomainRangeError("delta must be positive")
    cells = np.floor(cloud.points / delta).astype(np.int64)
    occupied = len(np.unique(cells, axis=0))
    return occupied * float(gauge(delta * np.sqrt(cloud.dim)))


class MassTree:
    """Nested boxes with masses: levels of (diam, mass) arrays.

    Level j+1 nodes must subdivide level j (mass conservation checked per
    level; geometric nesting is the caller's responsibility and is verified
    for the built-in constructions).
    """

    def __init__(self, levels):
        # levels: list of dicts {"diams": array, "masses": array}
        self.levels = levels
        for j, lv in enumerate(levels):
            total = float(np.sum(lv["masses"]))
            if abs(total - 1.0) > 1e-9:
                raise TreeInvalidError(f"masses at level {j} sum to {total}, not 1")
            if np.any(np.asarray(lv["masses"]) < 0):
                raise TreeInvalidError("negative mass")

    @classmethod
    def uniform(cls, diams_per_level, branching):
        """Equal split into `branching` children per node at each level."""
        levels = []
        count = 1
        for d in diams_per_level:
            levels.append({"diams": np.full(count, d), "masses": np.full(count, 1.0 / count)})
            count *= branching
        return cls(levels)


def mass_distribution_lower(tree, gauge):
    """inf over tree nodes of mass(U)/h(diam U).

    Certified lower bound for the content of the limit set carried by the
    mass distribution, up to the finite-depth caveat.
    """
    worst = np.inf
    detail = []
    for lv in tree.levels:
        ratios = lv["masses"] / np.asarray(gauge(lv["diams"]), dtype=np.float64)
        worst = min(worst, float(ratios.min()))
        detail.append(float(ratios.min()))
    return worst, detail
