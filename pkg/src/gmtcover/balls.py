"""Weighted ball families.

Two representations:

* ``BallFamily``      explicit column arrays (center, radius, weight,
                      provenance); the currency of covers and content bounds.
* ``SeedFamily``      one row per seed ball B(f_Q, r_Q) with the attached
                      concentric family (weights 2^i, radii r/2^i) and
                      annulus family (weights lam(k), radii alpha(2^-k))
                      kept in closed form; masses are exact geometric sums
                      and materialization is optional.

Provenance identifies every ball as (seed index, tag, index) so that
coinciding geometric balls from different sources stay distinct.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _defaults
from .errors import DomainRangeError, PreconditionError, TruncationError

TAG_S = 0  # concentric subball S_i, weight 2^i
TAG_R = 1  # annulus-scale ball R_k, weight lam(k)

_TAG_NAMES = {TAG_S: "S", TAG_R: "R"}


@dataclass(frozen=True)
class WeightedBall:
    center: tuple
    radius: float
    weight: float
    provenance: tuple  # (tag_name, seed_index, index)

    def __post_init__(self):
        if self.radius < 0 or self.weight <= 0:
            raise DomainRangeError("need radius >= 0 and weight > 0")


class BallFamily:
    """Column-oriented list of weighted balls with cached mass Σ w r^n."""

    def __init__(self, centers, radii, weights, seed, tag, idx, n):
        self.centers = np.ascontiguousarray(centers, dtype=np.float64)
        self.radii = np.ascontiguousarray(radii, dtype=np.float64)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        self.seed = np.ascontiguousarray(seed, dtype=np.int64)
        self.tag = np.ascontiguousarray(tag, dtype=np.int8)
        self.idx = np.ascontiguousarray(idx, dtype=np.int32)
        self.n = int(n)
        if np.any(self.radii < 0) or np.any(self.weights <= 0):
            raise DomainRangeError("need radii >= 0 and weights > 0")
        self._mass = float(np.sum(self.weights * self.radii**self.n))

    def __len__(self):
        return len(self.radii)

    @property
    def mass(self):
        return self._mass

    def recompute_mass(self):
        return float(np.sum(self.weights * self.radii**self.n))

    def ball(self, i):
        return WeightedBall(
            tuple(self.centers[i]),
            float(self.radii[i]),
            float(self.weights[i]),
            (_TAG_NAMES.get(int(self.tag[i]), "?"), int(self.seed[i]), int(self.idx[i])),
        )

    def provenance_keys(self):
        """(seed, tag, idx) triplets packed for distinctness checks."""
        return (
            self.seed.astype(np.int64) << np.int64(40)
        ) | (self.tag.astype(np.int64) << np.int64(32)) | self.idx.astype(np.int64)

    @classmethod
    def concat(cls, families):
        fams = [f for f in families if len(f)]
        if not fams:
            raise DomainRangeError("nothing to concatenate")
        n = fams[0].n
        return cls(
            np.concatenate([f.centers for f in fams]),
            np.concatenate([f.radii for f in fams]),
            np.concatenate([f.weights for f in fams]),
            np.concatenate([f.seed for f in fams]),
            np.concatenate([f.tag for f in fams]),
            np.concatenate([f.idx for f in fams]),
            n,
        )

    def select(self, mask):
        return BallFamily(
            self.centers[mask], self.radii[mask], self.weights[mask],
            self.seed[mask], self.tag[mask], self.idx[mask], self.n,
        )

    def to_jsonl_records(self):
        return [
            {
                "center": [float(c) for c in self.centers[i]],
                "radius": float(self.radii[i]),
                "weight": float(self.weights[i]),
                "provenance": [_TAG_NAMES.get(int(self.tag[i]), "?"), int(self.seed[i]), int(self.idx[i])],
            }
            for i in range(len(self))
        ]


# --------------------------------------------------------------------------
# closed-form truncation depths and masses
# --------------------------------------------------------------------------


def s_depth_for_tail(n, tail_rel=None):
    """Smallest i_max with discarded concentric-tail mass <= tail_rel * r^n."""
    tail_rel = tail_rel if tail_rel is not None else _defaults.FAMILY_TAIL_REL
    q = 2 ** (n - 1) - 1
    return max(1, math.ceil(math.log2(1.0 / (tail_rel * q)) / (n - 1)))


def s_mass_closed_form(r, n, i_max):
    """sum_{i=1}^{i_max} 2^i (r/2^i)^n = r^n (1 - 2^-(n-1)i_max)/(2^(n-1)-1)."""
    q = 2.0 ** (n - 1)
    return r**n * (1.0 - q**-i_max) / (q - 1.0)


def build_S_family(center, r, n, seed_index=0, i_max=None, radius_floor=None):
    """Concentric subballs S_i = B(center, r/2^i) with weights 2^i.

    Truncated at ``i_max`` (default: discarded tail below FAMILY_TAIL_REL of
    r^n) and additionally at ``radius_floor`` when given.  Mass <= r^n.
    """
    if r <= 0:
        raise PreconditionError("seed radius must be positive")
    if i_max is None:
        i_max = s_depth_for_tail(n)
    if radius_floor is not None and radius_floor > 0:
        i_cap = int(np.floor(np.log2(r / radius_floor))) if r > radius_floor else 0
        i_max = min(i_max, max(i_cap, 1))
    i = np.arange(1, i_max + 1)
    centers = np.repeat(np.asarray([center], dtype=np.float64), i_max, axis=0)
    return BallFamily(
        centers, r / 2.0**i, 2.0**i,
        np.full(i_max, seed_index, dtype=np.int64),
        np.full(i_max, TAG_S, dtype=np.int8),
        i.astype(np.int32), n,
    )


class AnnulusScale:
    """Precomputed alpha(2^-k), lam(k) for k in [base_index, k_hi]."""

    def __init__(self, modulus, k_hi):
        self.modulus = modulus
        self.k_lo = modulus.base_index
        self.k_hi = int(k_hi)
        ks = np.arange(self.k_lo, self.k_hi + 1)
        self.lam = np.asarray(modulus.lam(ks), dtype=np.float64)
        self.alpha = 2.0 ** (-ks.astype(np.float64)) / self.lam
        # suffix sums of alpha^n lam give annulus-family masses in O(1)/seed
        self._suffix = {}

    def suffix_mass(self, n):
        if n not in self._suffix:
            terms = self.alpha**n * self.lam
            self._suffix[n] = np.concatenate([np.cumsum(terms[::-1])[::-1], [0.0]])
        return self._suffix[n]

    def index(self, k):
        if not self.k_lo <= k <= self.k_hi:
            raise DomainRangeError(f"k={k} outside precomputed range [{self.k_lo},{self.k_hi}]")
        return int(k - self.k_lo)


def r_depth_for_tail(r, n, k_start, lambda_base, tail_rel=None):
    """Smallest k_max with the discarded annulus tail <= tail_rel * r^n.

    Tail bound: sum_{k>K} alpha^n lam <= 2 * 2^(-nK) * 2^(-n) / lam_base^(n-1).
    """
    tail_rel = tail_rel if tail_rel is not None else _defaults.FAMILY_TAIL_REL
    budget = tail_rel * r**n * lambda_base ** (n - 1) / 2.0
    k = k_start
    while 2.0 ** (-n * (k + 1)) > budget and k < k_start + 64:
        k += 1
    return k


def build_R_family(center, r, modulus, n, seed_index=0, scale=None, k_max=None):
    """Annulus-scale balls R_k = B(center, alpha(2^-k)) with weights lam(k).

    k starts at the smallest k with 2^-k <= r (floored at the modulus base
    index, where the weight bound constant is anchored).  Mass is bounded by
    (2 / lambda_base^(n-1)) r^n.
    """
    if r <= 0:
        raise PreconditionError("seed radius must be positive")
    k0 = max(0, math.ceil(-math.log2(r) - 1e-12))
    k_start = max(k0, modulus.base_index)
    if k_max is None:
        k_max = r_depth_for_tail(r, n, k_start, modulus.lambda_base)
    if scale is None:
        scale = AnnulusScale(modulus, k_max)
    if k_max > scale.k_hi:
        raise DomainRangeError("k_max beyond precomputed annulus scale")
    ks = np.arange(k_start, k_max + 1)
    sl = slice(scale.index(k_start), scale.index(k_max) + 1)
    centers = np.repeat(np.asarray([center], dtype=np.float64), len(ks), axis=0)
    return BallFamily(
        centers, scale.alpha[sl], scale.lam[sl],
        np.full(len(ks), seed_index, dtype=np.int64),
        np.full(len(ks), TAG_R, dtype=np.int8),
        ks.astype(np.int32), n,
    )


class SeedFamily:
    """All seeds' S- and R-families, kept lazily with closed-form masses.

    ``k_floor`` forces every seed's annulus family to extend at least to the
    given index so that downstream ball selection at analysis depth l can
    always find its R_k ball (extending the family only adds mass inside the
    stated bound).
    """

    def __init__(self, centers, radii, modulus, n, k_floor=0, tail_rel=None, c0_hint=16.0):
        radii = np.asarray(radii, dtype=np.float64).reshape(-1)
        if np.any(radii <= 0):
            raise PreconditionError("seed radii must be positive (filter r_Q = 0 seeds)")
        self.centers = np.ascontiguousarray(centers, dtype=np.float64)
        self.radii = radii
        self.modulus = modulus
        self.n = int(n)
        self.tail_rel = tail_rel if tail_rel is not None else _defaults.FAMILY_TAIL_REL

        k0 = np.maximum(0, np.ceil(-np.log2(radii) - 1e-12).astype(np.int64)) if len(radii) else radii.astype(np.int64)
        self.k_start = np.maximum(k0, modulus.base_index)
        lam_b = modulus.lambda_base
        budget = self.tail_rel * radii**self.n * lam_b ** (self.n - 1) / 2.0
        with np.errstate(divide="ignore"):
            k_tail = np.ceil(-np.log2(budget) / self.n - 1.0 + 1e-12).astype(np.int64) if len(radii) else k0
        self.k_max = np.maximum.reduce([self.k_start, k_tail, np.full_like(k_tail, k_floor)])
        k_hi = int(self.k_max.max()) if len(radii) else max(modulus.base_index, k_floor)
        self.scale = AnnulusScale(modulus, k_hi)

        self.i_tail = s_depth_for_tail(self.n, self.tail_rel)
        # concentric depth also covers selection: r/2^i >= alpha(2^-k_floor)/(8 c0)
        self.i_max = np.full(len(radii), self.i_tail, dtype=np.int64)
        if k_floor > 0:
            alpha_floor = float(self.scale.alpha[self.scale.index(min(k_floor, self.scale.k_hi))])
            need = np.ceil(np.log2(radii * (8.0 * c0_hint) / alpha_floor)).astype(np.int64)
            self.i_max = np.maximum(self.i_max, np.clip(need, 1, 80))

    def __len__(self):
        return len(self.radii)

    # --- closed-form masses ------------------------------------------------
    def s_masses(self):
        q = 2.0 ** (self.n - 1)
        return self.radii**self.n * (1.0 - q ** (-self.i_max.astype(np.float64))) / (q - 1.0)

    def r_masses(self):
        suffix = self.scale.suffix_mass(self.n)
        lo = self.k_start - self.scale.k_lo
        hi = self.k_max - self.scale.k_lo + 1
        return suffix[lo] - suffix[hi]

    @property
    def mass(self):
        return float(np.sum(self.s_masses()) + np.sum(self.r_masses()))

    def ball_count(self):
        return int(np.sum(self.i_max) + np.sum(self.k_max - self.k_start + 1))

    # --- individual balls (for selections) ---------------------------------
    def s_ball(self, seed, i):
        if not 1 <= i <= self.i_max[seed]:
            raise DomainRangeError(f"S_{i} not materialized for seed {seed}")
        return WeightedBall(
            tuple(self.centers[seed]), float(self.radii[seed] / 2.0**i), float(2.0**i),
            ("S", int(seed), int(i)),
        )

    def r_ball(self, seed, k):
        if not self.k_start[seed] <= k <= self.k_max[seed]:
            raise DomainRangeError(f"R_{k} not materialized for seed {seed}")
        j = self.scale.index(k)
        return WeightedBall(
            tuple(self.centers[seed]), float(self.scale.alpha[j]), float(self.scale.lam[j]),
            ("R", int(seed), int(k)),
        )

    # --- explicit form -------------------------------------------------------
    def materialize(self, max_balls=None):
        max_balls = max_balls if max_balls is not None else _defaults.EXPLICIT_FAMILY_MAX_BALLS
        total = self.ball_count()
        if total > max_balls:
            raise TruncationError(
                f"family has {total} balls, over the materialization budget {max_balls}",
                partial=None,
            )
        centers, radii, weights, seeds, tags, idxs = [], [], [], [], [], []
        # S-part, vectorized per index i
        for i in range(1, int(self.i_max.max()) + 1):
            m = self.i_max >= i
            cnt = int(m.sum())
            if cnt == 0:
                break
            centers.append(self.centers[m])
            radii.append(self.radii[m] / 2.0**i)
            weights.append(np.full(cnt, 2.0**i))
            seeds.append(np.flatnonzero(m).astype(np.int64))
            tags.append(np.full(cnt, TAG_S, dtype=np.int8))
            idxs.append(np.full(cnt, i, dtype=np.int32))
        # R-part, vectorized per k
        for k in range(int(self.k_start.min()), int(self.k_max.max()) + 1):
            m = (self.k_start <= k) & (k <= self.k_max)
            cnt = int(m.sum())
            if cnt == 0:
                continue
            j = self.scale.index(k)
            centers.append(self.centers[m])
            radii.append(np.full(cnt, self.scale.alpha[j]))
            weights.append(np.full(cnt, self.scale.lam[j]))
            seeds.append(np.flatnonzero(m).astype(np.int64))
            tags.append(np.full(cnt, TAG_R, dtype=np.int8))
            idxs.append(np.full(cnt, k, dtype=np.int32))
        return BallFamily(
            np.concatenate(centers), np.concatenate(radii), np.concatenate(weights),
            np.concatenate(seeds), np.concatenate(tags), np.concatenate(idxs), self.n,
        )
