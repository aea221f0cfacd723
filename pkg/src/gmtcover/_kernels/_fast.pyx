# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot kernels (see _ref.py for the contract).

Same algorithms as the numpy reference, with the per-cube / per-ball inner
loops in C.  Outputs are bit-identical to the reference: identical predicates,
identical canonical sorting.
"""

import itertools

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, floor, fabs, round as c_round

cnp.import_array()

DOMAIN_BALL = 0
DOMAIN_BOX = 1

MAX_LEVEL = {2: 30, 3: 19}

_AXIS_BITS = {2: 32, 3: 21}


def encode_keys(corners, n):
    bits = _AXIS_BITS[n]
    off = np.uint64(1 << (bits - 1))
    key = np.zeros(len(corners), dtype=np.uint64)
    for i in range(n):
        key = (key << np.uint64(bits)) | (corners[:, i].astype(np.int64) + np.int64(off)).astype(np.uint64)
    return key


def build_tables(levels, corners):
    n = corners.shape[1]
    tables = {}
    order = np.arange(len(levels), dtype=np.int64)
    for k in np.unique(levels):
        m = levels == k
        keys = encode_keys(corners[m], n)
        srt = np.argsort(keys, kind="stable")
        tables[int(k)] = (keys[srt], order[m][srt])
    return tables


cdef inline long long _bsearch(const unsigned long long* keys, long long nkeys,
                               unsigned long long target) noexcept nogil:
    cdef long long lo = 0, hi = nkeys - 1, mid
    while lo <= hi:
        mid = (lo + hi) >> 1
        if keys[mid] == target:
            return mid
        elif keys[mid] < target:
            lo = mid + 1
        else:
            hi = mid - 1
    return -1


def lookup(tables, k, cells):
    cdef long long m = len(cells)
    out = np.full(m, -1, dtype=np.int64)
    if k not in tables or m == 0:
        return out
    keys_arr, idx_arr = tables[k]
    ck = encode_keys(cells, cells.shape[1])
    cdef unsigned long long[::1] keys = keys_arr
    cdef long long[::1] idx = idx_arr
    cdef unsigned long long[::1] targets = ck
    cdef long long[::1] res = out
    cdef long long i, pos, nkeys = keys_arr.shape[0]
    with nogil:
        for i in range(m):
            pos = _bsearch(&keys[0], nkeys, targets[i])
            if pos >= 0:
                res[i] = idx[pos]
    return out


def whitney_cubes(int domain, int n, int max_level):
    """Maximal dyadic cubes with diam(Q) <= dist(Q, boundary)."""
    cdef double sqrt_n = sqrt(<double> n)
    if domain == DOMAIN_BALL:
        cur = np.array(list(itertools.product((-1, 0), repeat=n)), dtype=np.int64)
    elif domain == DOMAIN_BOX:
        cur = np.zeros((1, n), dtype=np.int64)
    else:
        raise ValueError(f"unknown domain code {domain}")

    out_levels, out_corners = [], []
    cdef long long[:, ::1] cv
    cdef signed char[::1] st
    cdef long long i, j, m_cur, lo, hi, near, far, s_min, s_max, side, margin, mg
    cdef double two_k
    cdef int k, recurse
    cdef bint is_ball
    for k in range(max_level + 1):
        m_cur = cur.shape[0]
        if m_cur == 0:
            break
        status = np.zeros(m_cur, dtype=np.int8)  # 0 drop, 1 keep, 2 recurse
        cv = cur
        st = status
        two_k = <double> ((<unsigned long long> 1) << k)
        side = (<long long> 1) << k
        is_ball = domain == 0
        with nogil:
            for i in range(m_cur):
                if is_ball:
                    s_min = 0
                    s_max = 0
                    for j in range(n):
                        lo = cv[i, j]
                        hi = lo + 1
                        if lo <= 0 <= hi:
                            near = 0
                        else:
                            near = -hi if hi < 0 else lo
                        far = -lo if -lo > hi else hi
                        s_min += near * near
                        s_max += far * far
                    if sqrt_n + sqrt(<double> s_max) <= two_k:
                        st[i] = 1
                    elif (<double> s_min) < two_k * two_k:
                        st[i] = 2
                else:
                    margin = side
                    recurse = 1
                    for j in range(n):
                        lo = cv[i, j]
                        if lo >= side or lo + 1 <= 0:
                            recurse = 0
                            margin = -1
                            break
                        mg = lo if lo < side - lo - 1 else side - lo - 1
                        if mg < margin:
                            margin = mg
                    if margin >= 0 and (<double> n) <= (<double> margin) * (<double> margin):
                        st[i] = 1
                    elif recurse:
                        st[i] = 2
        keep_mask = status == 1
        out_levels.append(np.full(int(keep_mask.sum()), k, dtype=np.int32))
        out_corners.append(cur[keep_mask])
        if k == max_level:
            break
        rec = cur[status == 2]
        child = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
        cur = (rec[:, None, :] * 2 + child[None, :, :]).reshape(-1, n)

    levels = np.concatenate(out_levels) if out_levels else np.zeros(0, dtype=np.int32)
    corners = np.concatenate(out_corners) if out_corners else np.zeros((0, n), dtype=np.int64)
    order = np.lexsort(tuple(corners[:, i] for i in range(n - 1, -1, -1)) + (levels,))
    return levels[order], np.ascontiguousarray(corners[order])


cdef inline unsigned long long _pack(const long long* c, int n, int bits) noexcept nogil:
    cdef unsigned long long key = 0
    cdef long long off = (<long long> 1) << (bits - 1)
    cdef int i
    for i in range(n):
        key = (key << bits) | (<unsigned long long> (c[i] + off))
    return key


def neighbor_pairs(levels, corners):
    """Unique undirected pairs (a < b) of cubes sharing at least one point."""
    cdef int n = corners.shape[1]
    cdef int bits = _AXIS_BITS[n]
    cdef long long N = len(levels)
    tables = build_tables(levels, corners)
    kmin = min(tables) if tables else 0
    kmax = max(tables) if tables else -1
    # flatten tables into per-level views addressable from C
    keys_by_level = {}
    idx_by_level = {}
    for lvl, (tk, ti) in tables.items():
        keys_by_level[lvl] = tk
        idx_by_level[lvl] = ti

    cdef const int[::1] lv = np.ascontiguousarray(levels, dtype=np.int32)
    cdef const long long[:, ::1] cs = np.ascontiguousarray(corners, dtype=np.int64)

    same_np = np.array([o for o in itertools.product((-1, 0, 1), repeat=n) if any(o)], dtype=np.int64)
    cdef const long long[:, ::1] same_offs = same_np
    cdef int n_same = same_np.shape[0]

    cap = int(N) * (3 ** int(n) + 2 * (1 << int(n)))
    out_a = np.empty(cap, dtype=np.int64)
    out_b = np.empty_like(out_a)
    cdef long long[::1] oa = out_a
    cdef long long[::1] ob = out_b
    cdef long long count = 0

    cdef int k, d, kc

    for k in sorted(tables):
        mask = np.asarray(levels) == k
        gi_np = np.flatnonzero(mask).astype(np.int64)
        cdef_gi = gi_np
        _same_level(cs, cdef_gi, keys_by_level[k], idx_by_level[k], same_offs, n, bits, oa, ob, &count)
        # coarser levels d = 1, 2
        for d in (1, 2):
            kc = k - d
            if kc not in tables:
                continue
            _coarse_level(cs, cdef_gi, keys_by_level[kc], idx_by_level[kc], d, n, bits, oa, ob, &count)

    a = out_a[:count]
    b = out_b[:count]
    if count == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    lo = np.minimum(a, b).astype(np.uint64)
    hi = np.maximum(a, b).astype(np.uint64)
    packed = np.unique((lo << np.uint64(32)) | hi)
    return (packed >> np.uint64(32)).astype(np.int64), (packed & np.uint64(0xFFFFFFFF)).astype(np.int64)


cdef void _same_level(const long long[:, ::1] cs, const long long[::1] gi,
                      const unsigned long long[::1] keys, const long long[::1] idx,
                      const long long[:, ::1] offs, int n, int bits,
                      long long[::1] oa, long long[::1] ob, long long* count) noexcept nogil:
    cdef long long m = gi.shape[0], nkeys = keys.shape[0]
    cdef long long i, g, pos, hit
    cdef int o, ax
    cdef long long cand[3]
    cdef unsigned long long key
    for i in range(m):
        g = gi[i]
        for o in range(offs.shape[0]):
            for ax in range(n):
                cand[ax] = cs[g, ax] + offs[o, ax]
            key = _pack(cand, n, bits)
            pos = _bsearch(&keys[0], nkeys, key)
            if pos >= 0:
                hit = idx[pos]
                if g < hit:
                    oa[count[0]] = g
                    ob[count[0]] = hit
                    count[0] += 1


cdef void _coarse_level(const long long[:, ::1] cs, const long long[::1] gi,
                        const unsigned long long[::1] keys, const long long[::1] idx,
                        int d, int n, int bits,
                        long long[::1] oa, long long[::1] ob, long long* count) noexcept nogil:
    cdef long long m = gi.shape[0], nkeys = keys.shape[0]
    cdef long long i, g, pos, c, s = (<long long> 1) << d
    cdef int ax, combo, ok
    cdef long long los[3]
    cdef long long his[3]
    cdef long long cand[3]
    cdef unsigned long long key
    for i in range(m):
        g = gi[i]
        for ax in range(n):
            c = cs[g, ax]
            # ceil(c/s) - 1 (floor division is toward -inf for python, emulate)
            if c >= 0:
                los[ax] = (c + s - 1) / s - 1
            else:
                los[ax] = -((-c) / s) - 1
            if c + 1 >= 0:
                his[ax] = (c + 1) / s
            else:
                his[ax] = -((-(c + 1) + s - 1) / s)
        for combo in range(1 << n):
            ok = 1
            for ax in range(n):
                cand[ax] = los[ax] + ((combo >> ax) & 1)
                if cand[ax] > his[ax]:
                    ok = 0
                    break
            if not ok:
                continue
            key = _pack(cand, n, bits)
            pos = _bsearch(&keys[0], nkeys, key)
            if pos >= 0:
                oa[count[0]] = g
                ob[count[0]] = idx[pos]
                count[0] += 1


def supercover_cells(omega, int k, double tmax):
    """All level-k cells whose closed cube touches {t*omega : 0 <= t <= tmax}."""
    omega = np.asarray(omega, dtype=np.float64)
    cdef int n = omega.shape[0]
    cdef double scale = <double> ((<unsigned long long> 1) << k)
    cdef int i

    cross_ts = [np.array([0.0, tmax])]
    for i in range(n):
        wi = omega[i] * scale
        if wi == 0.0:
            continue
        last = int(floor(fabs(omega[i] * tmax * scale)))
        ms = np.arange(1, last + 1, dtype=np.float64) * (1.0 if wi > 0 else -1.0)
        tvals = ms / wi
        cross_ts.append(tvals[(tvals > 0) & (tvals < tmax)])
    ts_arr = np.unique(np.concatenate(cross_ts))
    cdef long long nts = ts_arr.shape[0]

    zero_axes = [i for i in range(n) if omega[i] == 0.0]
    cells = []
    if nts >= 2:
        mid = (ts_arr[:-1] + ts_arr[1:]) / 2.0
        base = np.floor(np.outer(mid, omega) * scale).astype(np.int64)
        if zero_axes:
            for combo in itertools.product((-1, 0), repeat=len(zero_axes)):
                c = base.copy()
                for ax, v in zip(zero_axes, combo):
                    c[:, ax] = v
                cells.append(c)
        else:
            cells.append(base)
    pts = np.outer(ts_arr, omega) * scale
    rounded = np.round(pts)
    on_line = np.abs(pts - rounded) <= 1e-9 * np.maximum(1.0, np.abs(pts))
    cdef long long jj
    for jj in range(nts):
        choices = []
        for i in range(n):
            if omega[i] == 0.0:
                choices.append((-1, 0))
            elif on_line[jj, i]:
                v = int(rounded[jj, i])
                choices.append((v - 1, v))
            else:
                choices.append((int(floor(pts[jj, i])),))
        for combo in itertools.product(*choices):
            cells.append(np.array([combo], dtype=np.int64))
    allc = np.concatenate(cells, axis=0)
    return np.unique(allc, axis=0)


def weighted_containment(centers, radii, weights, points, double blow=1.0, chunk=None):
    """For each point, the total weight of balls containing it (closed balls)."""
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=np.float64)))
    cen = np.ascontiguousarray(centers, dtype=np.float64)
    rad = np.ascontiguousarray(radii, dtype=np.float64)
    wei = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.zeros(len(pts), dtype=np.float64)
    cdef double[:, ::1] p = pts
    cdef double[:, ::1] c = cen
    cdef double[::1] r = rad
    cdef double[::1] wv = wei
    cdef double[::1] s = out
    cdef long long nb = rad.shape[0], np_ = pts.shape[0]
    cdef int dim = pts.shape[1], d
    cdef long long i, j
    cdef double d2, rr, diff
    with nogil:
        for j in range(np_):
            for i in range(nb):
                rr = blow * r[i]
                rr = rr * rr
                d2 = 0.0
                for d in range(dim):
                    diff = p[j, d] - c[i, d]
                    d2 += diff * diff
                    if d2 > rr:
                        break
                if d2 <= rr:
                    s[j] += wv[i]
    return out
