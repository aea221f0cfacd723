"""Reference (numpy) implementation of the hot kernels.

The compiled extension in ``_fast.pyx`` mirrors these signatures exactly;
``gmtcover._kernels`` selects whichever is available at import time.  All
routines are deterministic: outputs are sorted canonically before return.

Geometry conventions
--------------------
A dyadic cube at level ``k`` with integer corner ``c`` is the closed box
``[c * 2^-k, (c+1) * 2^-k]`` per axis.  Domain codes: 0 = open unit ball
centered at the origin, 1 = open unit box (0,1)^n.

Exactness note: for the ball, the selection predicate compares
``sqrt(n) + sqrt(S) <= 2^k`` with integer ``S``; equality would force
``sqrt(n*S)`` rational with ``n`` in {2,3}, which has no integer solution,
so float64 evaluation decides every cube correctly at the supported depths.
"""

import itertools

import numpy as np

DOMAIN_BALL = 0
DOMAIN_BOX = 1

# key packing: n=2 -> 32 bits/axis (levels <= 30), n=3 -> 21 bits/axis (levels <= 19)
_AXIS_BITS = {2: 32, 3: 21}
MAX_LEVEL = {2: 30, 3: 19}


def encode_keys(corners, n):
    """Pack integer corners into sortable uint64 keys."""
    bits = _AXIS_BITS[n]
    off = np.uint64(1 << (bits - 1))
    key = np.zeros(len(corners), dtype=np.uint64)
    for i in range(n):
        key = (key << np.uint64(bits)) | (corners[:, i].astype(np.int64) + np.int64(off)).astype(np.uint64)
    return key


def build_tables(levels, corners):
    """Per-level sorted (keys, global_index) lookup tables."""
    n = corners.shape[1]
    tables = {}
    order = np.arange(len(levels), dtype=np.int64)
    for k in np.unique(levels):
        m = levels == k
        keys = encode_keys(corners[m], n)
        srt = np.argsort(keys, kind="stable")
        tables[int(k)] = (keys[srt], order[m][srt])
    return tables


def lookup(tables, k, cells):
    """Global indices of the cells present at level k (-1 where absent)."""
    out = np.full(len(cells), -1, dtype=np.int64)
    if k not in tables or len(cells) == 0:
        return out
    keys, idx = tables[k]
    ck = encode_keys(cells, cells.shape[1])
    pos = np.searchsorted(keys, ck)
    pos = np.clip(pos, 0, len(keys) - 1)
    hit = keys[pos] == ck
    out[hit] = idx[pos][hit]
    return out


def _child_offsets(n):
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)


def whitney_cubes(domain, n, max_level):
    """Maximal dyadic cubes with diam(Q) <= dist(Q, boundary).

    Returns (levels int32[N], corners int64[N, n]) sorted by (level, corner).
    Cubes still undecided at max_level form the unresolved collar and are
    dropped.
    """
    sqrt_n = np.sqrt(n)
    if domain == DOMAIN_BALL:
        cur = np.array(list(itertools.product((-1, 0), repeat=n)), dtype=np.int64)
    elif domain == DOMAIN_BOX:
        cur = np.zeros((1, n), dtype=np.int64)
    else:
        raise ValueError(f"unknown domain code {domain}")
    child = _child_offsets(n)
    out_levels, out_corners = [], []
    for k in range(max_level + 1):
        if len(cur) == 0:
            break
        if domain == DOMAIN_BALL:
            lo = cur
            hi = cur + 1
            near = np.where((lo <= 0) & (hi >= 0), 0, np.minimum(np.abs(lo), np.abs(hi)))
            far = np.maximum(np.abs(lo), np.abs(hi))
            s_min = (near.astype(np.float64) ** 2).sum(1)
            s_max = (far.astype(np.float64) ** 2).sum(1)
            two_k = float(1 << k)
            outside = s_min >= two_k * two_k
            keep = sqrt_n + np.sqrt(s_max) <= two_k
        else:
            side = np.int64(1 << k)
            inside = np.all((cur >= 0) & (cur + 1 <= side), axis=1)
            outside = np.any((cur >= side) | (cur + 1 <= 0), axis=1)
            margin = np.minimum(cur, side - cur - 1).min(axis=1)
            keep = inside & (margin >= 0) & (n <= margin.astype(np.float64) ** 2)
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


def neighbor_pairs(levels, corners):
    """Unique undirected pairs (a < b) of cubes sharing at least one point.

    Whitney geometry bounds neighbor level differences by 2, so it suffices
    to link each cube to candidates at its own and the two coarser levels
    and then symmetrize.
    """
    n = corners.shape[1]
    tables = build_tables(levels, corners)
    order = np.arange(len(levels), dtype=np.int64)
    same_offsets = [np.array(o, dtype=np.int64) for o in itertools.product((-1, 0, 1), repeat=n) if any(o)]
    box_offsets = _child_offsets(n)
    pa, pb = [], []
    for k in sorted(tables):
        m = levels == k
        gi = order[m]
        cs = corners[m]
        for off in same_offsets:
            hits = lookup(tables, k, cs + off)
            ok = hits >= 0
            a, b = gi[ok], hits[ok]
            lt = a < b
            pa.append(a[lt])
            pb.append(b[lt])
        for d in (1, 2):
            kc = k - d
            if kc not in tables:
                continue
            s = np.int64(1 << d)
            los = -(-cs // s) - 1  # ceil(c/s) - 1
            his = (cs + 1) // s
            for off in box_offsets:
                cand = los + off
                valid = np.all(cand <= his, axis=1)
                hits = lookup(tables, kc, cand[valid])
                ok = hits >= 0
                pa.append(gi[valid][ok])
                pb.append(hits[ok])
    if not pa:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    a = np.concatenate(pa)
    b = np.concatenate(pb)
    lo = np.minimum(a, b).astype(np.uint64)
    hi = np.maximum(a, b).astype(np.uint64)
    packed = np.unique((lo << np.uint64(32)) | hi)
    return (packed >> np.uint64(32)).astype(np.int64), (packed & np.uint64(0xFFFFFFFF)).astype(np.int64)


def supercover_cells(omega, k, tmax):
    """All level-k lattice cells whose closed cube touches {t*omega : 0<=t<=tmax}.

    Includes cells touched only at a point or along a face (ties are kept on
    both sides, matching the chain convention that touched cubes count).
    """
    omega = np.asarray(omega, dtype=np.float64)
    n = len(omega)
    scale = float(1 << k)
    end = omega * tmax * scale

    cross_ts = [0.0, tmax]
    for i in range(n):
        w = omega[i] * scale
        if w == 0.0:
            continue
        last = int(np.floor(abs(end[i])))
        ms = np.arange(1, last + 1, dtype=np.float64) * np.sign(w)
        ts = ms / w
        cross_ts.append(ts[(ts > 0) & (ts < tmax)])
    ts = np.unique(np.concatenate([np.atleast_1d(np.asarray(t, dtype=np.float64)) for t in cross_ts]))

    cells = []
    zero_axes = [i for i in range(n) if omega[i] == 0.0]
    # open intervals between consecutive crossing parameters
    if len(ts) >= 2:
        mid = (ts[:-1] + ts[1:]) / 2.0
        base = np.floor(np.outer(mid, omega) * scale).astype(np.int64)
        if zero_axes:
            for combo in itertools.product((-1, 0), repeat=len(zero_axes)):
                c = base.copy()
                for ax, v in zip(zero_axes, combo):
                    c[:, ax] = v
                cells.append(c)
        else:
            cells.append(base)
    # touched cells at each crossing point (corner / face contacts)
    pts = np.outer(ts, omega) * scale
    rounded = np.round(pts)
    on_line = np.abs(pts - rounded) <= 1e-9 * np.maximum(1.0, np.abs(pts))
    for j in range(len(ts)):
        choices = []
        for i in range(n):
            if omega[i] == 0.0:
                choices.append((-1, 0))
            elif on_line[j, i]:
                v = int(rounded[j, i])
                choices.append((v - 1, v))
            else:
                choices.append((int(np.floor(pts[j, i])),))
        for combo in itertools.product(*choices):
            cells.append(np.array([combo], dtype=np.int64))
    allc = np.concatenate(cells, axis=0)
    allc = np.unique(allc, axis=0)
    return allc


def weighted_containment(centers, radii, weights, points, blow=1.0, chunk=1 << 18):
    """For each point, the total weight of balls containing it.

    A point counts as inside when |p - c| <= blow * r (closed balls).
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    sums = np.zeros(len(points), dtype=np.float64)
    nb = len(radii)
    for lo in range(0, nb, chunk):
        hi = min(lo + chunk, nb)
        d2 = ((points[:, None, :] - centers[None, lo:hi, :]) ** 2).sum(axis=2)
        rr = (blow * radii[lo:hi]) ** 2
        inside = d2 <= rr[None, :]
        sums += inside @ weights[lo:hi]
    return sums
