"""Pure-Python sign-vector enumeration kernels.

These are the hot loops of the whole tool: walk all 2^n sign vectors of
a Rademacher sum over an integer lattice model and histogram the scaled
distances.  Everything is plain integer arithmetic so results are exact;
``grouprob.kernels._fast`` is the compiled twin with the same contracts.

Conventions shared by both implementations:

* ``coords``: one integer row per element, already multiplied by any
  exponent (and reduced mod ``mod`` when ``mod > 0``);
* ``weights``: nonnegative integers on a common denominator (the caller
  divides histogram keys by that scale);
* ``mod == 0`` means the free-abelian distance ``sum w_j |v_j|``, else
  the wrap distance ``sum w_j min(v_j, mod - v_j)`` on residues.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

MAX_EXACT_N = 24


def _check_shape(coords, weights, mod):
    n = len(coords)
    if n > MAX_EXACT_N:
        raise ValueError(f"exact enumeration capped at n = {MAX_EXACT_N}")
    d = len(weights)
    for row in coords:
        if len(row) != d:
            raise ValueError("coordinate rows must match the weight vector")
    if mod < 0:
        raise ValueError("mod must be >= 0")
    return n, d


def rademacher_distance_counts(coords: Sequence[Sequence[int]],
                               weights: Sequence[int],
                               mod: int) -> Dict[int, int]:
    """Histogram of the scaled distance d(1, prod_k x_k^{r_k}) over all signs.

    Returns {scaled_distance: count}; counts sum to 2**n.  Iteration is a
    reflected Gray code so each step flips a single sign and touches only
    that element's coordinates.
    """
    n, d = _check_shape(coords, weights, mod)
    rows = [list(r) for r in coords]
    if mod:
        rows = [[c % mod for c in r] for r in rows]
    vec = [0] * d
    for r in rows:
        for j in range(d):
            vec[j] += r[j]
    terms = [0] * d
    if mod:
        vec = [v % mod for v in vec]
        for j in range(d):
            v = vec[j]
            terms[j] = weights[j] * (v if v <= mod - v else mod - v)
    else:
        for j in range(d):
            terms[j] = weights[j] * abs(vec[j])
    dist = sum(terms)
    signs = [1] * n
    counts: Dict[int, int] = {dist: 1}
    get = counts.get
    for i in range(1, 1 << n):
        k = (i & -i).bit_length() - 1
        s = signs[k]
        signs[k] = -s
        row = rows[k]
        step = -2 * s
        if mod:
            for j in range(d):
                c = row[j]
                if c:
                    v = (vec[j] + step * c) % mod
                    vec[j] = v
                    dist -= terms[j]
                    t = weights[j] * (v if v <= mod - v else mod - v)
                    terms[j] = t
                    dist += t
        else:
            for j in range(d):
                c = row[j]
                if c:
                    v = vec[j] + step * c
                    vec[j] = v
                    dist -= terms[j]
                    t = weights[j] * (v if v >= 0 else -v)
                    terms[j] = t
                    dist += t
        counts[dist] = get(dist, 0) + 1
    return counts


def levy_pair_counts(coords: Sequence[Sequence[int]],
                     weights: Sequence[int],
                     mod: int,
                     masks: Sequence[int]) -> Dict[Tuple[int, int], int]:
    """Joint histogram for the maximal-inequality events.

    For every sign vector computes ``M = max_k dist(doubled subset-product
    over masks[k])`` and ``F = dist(full product)`` and returns
    ``{(M, F): count}``.  Masks are bitmasks over element indices.
    """
    n, d = _check_shape(coords, weights, mod)
    if not masks:
        raise ValueError("need at least one mask")
    rows = [list(r) for r in coords]
    if mod:
        rows = [[c % mod for c in r] for r in rows]
    m = len(masks)
    subs: List[List[int]] = [[0] * d for _ in range(m + 1)]  # [m] = full product
    members: List[List[int]] = [[] for _ in range(n)]
    for mi, mask in enumerate(masks):
        for k in range(n):
            if mask >> k & 1:
                members[k].append(mi)
    for k in range(n):
        members[k].append(m)
        row = rows[k]
        for mi, mask in enumerate(masks):
            if mask >> k & 1:
                sub = subs[mi]
                for j in range(d):
                    sub[j] += row[j]
        full = subs[m]
        for j in range(d):
            full[j] += row[j]
    if mod:
        for sub in subs:
            for j in range(d):
                sub[j] %= mod

    def dist_double(vecv: List[int]) -> int:
        total = 0
        if mod:
            for j in range(d):
                v = (2 * vecv[j]) % mod
                total += weights[j] * (v if v <= mod - v else mod - v)
        else:
            for j in range(d):
                v = 2 * vecv[j]
                total += weights[j] * (v if v >= 0 else -v)
        return total

    def dist_single(vecv: List[int]) -> int:
        total = 0
        if mod:
            for j in range(d):
                v = vecv[j]
                total += weights[j] * (v if v <= mod - v else mod - v)
        else:
            for j in range(d):
                v = vecv[j]
                total += weights[j] * (v if v >= 0 else -v)
        return total

    dists = [dist_double(subs[mi]) for mi in range(m)]
    fdist = dist_single(subs[m])
    signs = [1] * n
    counts: Dict[Tuple[int, int], int] = {(max(dists), fdist): 1}
    get = counts.get
    for i in range(1, 1 << n):
        k = (i & -i).bit_length() - 1
        s = signs[k]
        signs[k] = -s
        step = -2 * s
        row = rows[k]
        for mi in members[k]:
            sub = subs[mi]
            if mod:
                for j in range(d):
                    c = row[j]
                    if c:
                        sub[j] = (sub[j] + step * c) % mod
            else:
                for j in range(d):
                    c = row[j]
                    if c:
                        sub[j] += step * c
            if mi == m:
                fdist = dist_single(sub)
            else:
                dists[mi] = dist_double(sub)
        key = (max(dists), fdist)
        counts[key] = get(key, 0) + 1
    return counts
