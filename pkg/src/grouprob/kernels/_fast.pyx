# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sign-vector enumeration kernels.

Same contracts as grouprob.kernels._pure, which is the reference
implementation; tests cross-check the two on random inputs.  All
arithmetic fits comfortably in 64-bit for the documented caps
(n <= 24, coordinates and weights at desk scale), which callers enforce.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc

MAX_EXACT_N = 24


cdef inline long long _term(long long v, long long w, long long mod) nogil:
    cdef long long t
    if mod:
        t = v if v <= mod - v else mod - v
    else:
        t = v if v >= 0 else -v
    return w * t


def rademacher_distance_counts(coords, weights, long long mod):
    """Histogram {scaled_distance: count} over all 2^n sign vectors."""
    cdef int n = len(coords)
    cdef int d = len(weights)
    if n > MAX_EXACT_N:
        raise ValueError(f"exact enumeration capped at n = {MAX_EXACT_N}")
    if mod < 0:
        raise ValueError("mod must be >= 0")
    for row in coords:
        if len(row) != d:
            raise ValueError("coordinate rows must match the weight vector")

    cdef long long *c = <long long *> PyMem_Malloc(max(n * d, 1) * sizeof(long long))
    cdef long long *w = <long long *> PyMem_Malloc(max(d, 1) * sizeof(long long))
    cdef long long *vec = <long long *> PyMem_Malloc(max(d, 1) * sizeof(long long))
    cdef long long *terms = <long long *> PyMem_Malloc(max(d, 1) * sizeof(long long))
    cdef signed char *signs = <signed char *> PyMem_Malloc(max(n, 1))
    cdef long long *hist = NULL
    if not (c and w and vec and terms and signs):
        raise MemoryError()
    cdef int i, j, k
    cdef long long v, dist, maxdist, total, step, cij
    cdef unsigned long long idx, count
    try:
        for i in range(n):
            row = coords[i]
            for j in range(d):
                cij = row[j]
                if mod:
                    cij = cij % mod
                    if cij < 0:
                        cij += mod
                c[i * d + j] = cij
        for j in range(d):
            w[j] = weights[j]
            vec[j] = 0
        for i in range(n):
            for j in range(d):
                vec[j] += c[i * d + j]
        maxdist = 0
        if mod:
            for j in range(d):
                vec[j] = vec[j] % mod
                maxdist += w[j] * (mod // 2)
        else:
            for j in range(d):
                total = 0
                for i in range(n):
                    cij = c[i * d + j]
                    total += cij if cij >= 0 else -cij
                maxdist += w[j] * total
        hist = <long long *> PyMem_Malloc((maxdist + 1) * sizeof(long long))
        if not hist:
            raise MemoryError()
        for v in range(maxdist + 1):
            hist[v] = 0
        dist = 0
        for j in range(d):
            terms[j] = _term(vec[j], w[j], mod)
            dist += terms[j]
        for i in range(n):
            signs[i] = 1
        hist[dist] += 1
        count = (<unsigned long long> 1) << n
        for idx in range(1, count):
            k = 0
            while not (idx >> k) & 1:
                k += 1
            step = -2 * signs[k]
            signs[k] = -signs[k]
            for j in range(d):
                cij = c[k * d + j]
                if cij:
                    v = vec[j] + step * cij
                    if mod:
                        v = v % mod
                        if v < 0:
                            v += mod
                    vec[j] = v
                    dist -= terms[j]
                    terms[j] = _term(v, w[j], mod)
                    dist += terms[j]
            hist[dist] += 1
        counts = {}
        for v in range(maxdist + 1):
            if hist[v]:
                counts[v] = hist[v]
        return counts
    finally:
        PyMem_Free(c)
        PyMem_Free(w)
        PyMem_Free(vec)
        PyMem_Free(terms)
        PyMem_Free(signs)
        if hist:
            PyMem_Free(hist)


def levy_pair_counts(coords, weights, long long mod, masks):
    """Joint histogram {(max_k dist(2 * subset_k), dist(full)): count}."""
    cdef int n = len(coords)
    cdef int d = len(weights)
    cdef int m = len(masks)
    if n > MAX_EXACT_N:
        raise ValueError(f"exact enumeration capped at n = {MAX_EXACT_N}")
    if mod < 0:
        raise ValueError("mod must be >= 0")
    if m == 0:
        raise ValueError("need at least one mask")
    for row in coords:
        if len(row) != d:
            raise ValueError("coordinate rows must match the weight vector")

    # subs holds m subset vectors then the full-product vector
    cdef long long *c = <long long *> PyMem_Malloc(max(n * d, 1) * sizeof(long long))
    cdef long long *w = <long long *> PyMem_Malloc(max(d, 1) * sizeof(long long))
    cdef long long *subs = <long long *> PyMem_Malloc((m + 1) * d * sizeof(long long))
    cdef long long *dists = <long long *> PyMem_Malloc((m + 1) * sizeof(long long))
    cdef unsigned long long *mk = <unsigned long long *> PyMem_Malloc(max(m, 1) * sizeof(unsigned long long))
    cdef signed char *signs = <signed char *> PyMem_Malloc(max(n, 1))
    if not (c and w and subs and dists and mk and signs):
        raise MemoryError()
    cdef int i, j, k, mi
    cdef long long v, step, cij, fdist, maxd
    cdef unsigned long long idx, count
    try:
        for i in range(n):
            row = coords[i]
            for j in range(d):
                cij = row[j]
                if mod:
                    cij = cij % mod
                    if cij < 0:
                        cij += mod
                c[i * d + j] = cij
        for j in range(d):
            w[j] = weights[j]
        for mi in range(m):
            mk[mi] = masks[mi]
        for mi in range(m + 1):
            for j in range(d):
                subs[mi * d + j] = 0
        for k in range(n):
            for mi in range(m):
                if (mk[mi] >> k) & 1:
                    for j in range(d):
                        subs[mi * d + j] += c[k * d + j]
            for j in range(d):
                subs[m * d + j] += c[k * d + j]
        if mod:
            for mi in range(m + 1):
                for j in range(d):
                    subs[mi * d + j] = subs[mi * d + j] % mod
        for mi in range(m):
            dists[mi] = 0
            for j in range(d):
                v = 2 * subs[mi * d + j]
                if mod:
                    v = v % mod
                dists[mi] += _term(v, w[j], mod)
        fdist = 0
        for j in range(d):
            fdist += _term(subs[m * d + j], w[j], mod)
        for i in range(n):
            signs[i] = 1
        maxd = dists[0]
        for mi in range(1, m):
            if dists[mi] > maxd:
                maxd = dists[mi]
        counts = {(maxd, fdist): 1}
        count = (<unsigned long long> 1) << n
        for idx in range(1, count):
            k = 0
            while not (idx >> k) & 1:
                k += 1
            step = -2 * signs[k]
            signs[k] = -signs[k]
            for mi in range(m):
                if (mk[mi] >> k) & 1:
                    dists[mi] = 0
                    for j in range(d):
                        cij = c[k * d + j]
                        v = subs[mi * d + j] + step * cij
                        if mod:
                            v = v % mod
                            if v < 0:
                                v += mod
                        subs[mi * d + j] = v
                        v = 2 * v
                        if mod:
                            v = v % mod
                        dists[mi] += _term(v, w[j], mod)
            fdist = 0
            for j in range(d):
                cij = c[k * d + j]
                v = subs[m * d + j] + step * cij
                if mod:
                    v = v % mod
                    if v < 0:
                        v += mod
                subs[m * d + j] = v
                fdist += _term(v, w[j], mod)
            maxd = dists[0]
            for mi in range(1, m):
                if dists[mi] > maxd:
                    maxd = dists[mi]
            key = (maxd, fdist)
            if key in counts:
                counts[key] += 1
            else:
                counts[key] = 1
        return counts
    finally:
        PyMem_Free(c)
        PyMem_Free(w)
        PyMem_Free(subs)
        PyMem_Free(dists)
        PyMem_Free(mk)
        PyMem_Free(signs)
