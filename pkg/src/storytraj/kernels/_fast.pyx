# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled solver kernels.

Mirror of _pure.py: identical scan orders, strict comparisons, and
floating-point expression order, so results match the fallback
bit-for-bit.
"""

import numpy as np

cdef double _INF = float("inf")
cdef double _EPS = 1e-12


def held_karp(d, int start=-1, int end=-1):
    """Minimum-cost open Hamiltonian path by subset dynamic programming.

    ``d`` must be symmetric; endpoints of -1 are free.
    """
    cdef const double[:, ::1] dd = np.ascontiguousarray(d, dtype=np.float64)
    cdef int n = dd.shape[0]
    cdef long size = 1 << n
    dp_arr = np.full((size, n), np.inf, dtype=np.float64)
    parent_arr = np.full((size, n), -1, dtype=np.int8)
    cdef double[:, ::1] dp = dp_arr
    cdef signed char[:, ::1] parent = parent_arr

    cdef int k, t, s, arg, last
    cdef long mask, pm, full
    cdef double best, c, cost

    if start < 0:
        for k in range(n):
            dp[1 << k, k] = 0.0
    else:
        dp[1 << start, start] = 0.0

    for mask in range(3, size):
        if mask & (mask - 1) == 0:
            continue  # singleton: initialization only
        for t in range(n):
            if not (mask >> t) & 1:
                continue
            pm = mask ^ (1 << t)
            best = _INF
            arg = -1
            for s in range(n):
                if not (pm >> s) & 1:
                    continue
                c = dp[pm, s] + dd[t, s]
                if c < best:
                    best = c
                    arg = s
            if arg >= 0:
                dp[mask, t] = best
                parent[mask, t] = <signed char> arg

    full = size - 1
    if end >= 0:
        last = end
        cost = dp[full, end]
    else:
        cost = _INF
        last = -1
        for t in range(n):
            if dp[full, t] < cost:
                cost = dp[full, t]
                last = t

    order = []
    mask = full
    t = last
    cdef int pt
    while t >= 0:
        order.append(t)
        pt = parent[mask, t]
        mask ^= 1 << t
        t = pt
    order.reverse()
    return float(cost), order


def nearest_neighbor(d, int start, int final=-1):
    """Greedy construction from ``start``; ties go to the smaller index."""
    cdef const double[:, ::1] dd = np.ascontiguousarray(d, dtype=np.float64)
    cdef int n = dd.shape[0]
    visited_arr = np.zeros(n, dtype=np.int8)
    cdef signed char[::1] visited = visited_arr
    cdef int cur = start, v, arg, step, remaining
    cdef double best

    visited[start] = 1
    order = [start]
    if final >= 0:
        visited[final] = 1
    remaining = n - 1 - (1 if final >= 0 else 0)
    for step in range(remaining):
        best = _INF
        arg = -1
        for v in range(n):
            if not visited[v] and dd[cur, v] < best:
                best = dd[cur, v]
                arg = v
        order.append(arg)
        visited[arg] = 1
        cur = arg
    if final >= 0:
        order.append(final)
    return order


def refine(d, order, bint lock_ends=False):
    """Best-improvement 2-opt + Or-opt local search on an open path."""
    cdef const double[:, ::1] dd = np.ascontiguousarray(d, dtype=np.float64)
    cdef int n = len(order)
    if n < 3:
        return list(order)

    p_arr = np.asarray(order, dtype=np.int32).copy()
    buf_arr = np.empty(n, dtype=np.int32)
    cdef int[::1] p = p_arr
    cdef int[::1] buf = buf_arr

    cdef bint improved = True
    cdef int i, j, bi, bj, ilo, jhi, lo, hi
    cdef int L, s, t, bL, bs, bt, slo, shi, tlo, thi, m
    cdef int seg_a, seg_b, left, right, q, w
    cdef double best, delta, rm, ins

    while improved:
        improved = False

        # 2-opt: reverse p[i..j]; endpoints may move when not locked.
        while True:
            best = -_EPS
            bi = -1
            bj = -1
            ilo = 1 if lock_ends else 0
            jhi = n - 2 if lock_ends else n - 1
            for i in range(ilo, n - 1):
                for j in range(i + 1, jhi + 1):
                    if i == 0 and j == n - 1:
                        continue  # whole-path reversal is a no-op
                    delta = 0.0
                    if i > 0:
                        delta += dd[p[i - 1], p[j]] - dd[p[i - 1], p[i]]
                    if j < n - 1:
                        delta += dd[p[i], p[j + 1]] - dd[p[j], p[j + 1]]
                    if delta < best:
                        best = delta
                        bi = i
                        bj = j
            if bi < 0:
                break
            lo = bi
            hi = bj
            while lo < hi:
                w = p[lo]
                p[lo] = p[hi]
                p[hi] = w
                lo += 1
                hi -= 1
            improved = True

        # Or-opt: relocate a segment of 1..3 nodes, orientation kept.
        while True:
            best = -_EPS
            bL = -1
            bs = -1
            bt = -1
            for L in range(1, 4):
                if L >= n:
                    break
                slo = 1 if lock_ends else 0
                shi = (n - 1 - L) if lock_ends else (n - L)
                m = n - L
                tlo = 1 if lock_ends else 0
                thi = (m - 1) if lock_ends else m
                for s in range(slo, shi + 1):
                    seg_a = p[s]
                    seg_b = p[s + L - 1]
                    if 0 < s and s + L < n:
                        rm = (dd[p[s - 1], p[s + L]]
                              - dd[p[s - 1], seg_a]
                              - dd[seg_b, p[s + L]])
                    elif s > 0:
                        rm = -dd[p[s - 1], seg_a]
                    else:
                        rm = -dd[seg_b, p[s + L]]
                    for t in range(tlo, thi + 1):
                        if t == s:
                            continue  # original position: no-op
                        left = -1
                        right = -1
                        if t > 0:
                            left = p[t - 1] if t - 1 < s else p[t - 1 + L]
                        if t < m:
                            right = p[t] if t < s else p[t + L]
                        if 0 < t < m:
                            ins = dd[left, seg_a] + dd[seg_b, right] - dd[left, right]
                        elif t == 0:
                            ins = dd[seg_b, right]
                        else:
                            ins = dd[left, seg_a]
                        delta = rm + ins
                        if delta < best:
                            best = delta
                            bL = L
                            bs = s
                            bt = t
            if bL < 0:
                break
            # rebuild: remainder with the segment inserted before slot bt
            q = 0
            for i in range(n):
                if bs <= i < bs + bL:
                    continue
                if q == bt:
                    for j in range(bL):
                        buf[q + j] = p[bs + j]
                    q += bL
                buf[q] = p[i]
                q += 1
            if q < n:  # segment goes at the very end
                for j in range(bL):
                    buf[q + j] = p[bs + j]
            for i in range(n):
                p[i] = buf[i]
            improved = True

    return [int(x) for x in p_arr]
