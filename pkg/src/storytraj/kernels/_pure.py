"""Pure-Python solver kernels (fallback backend).

Same contracts and tie-breaking as the compiled kernels in _fast.pyx:
scans ascend, comparisons are strict, and floating-point expressions are
evaluated in the same order, so both backends return identical results.
"""

from __future__ import annotations

import numpy as np

_INF = float("inf")
_EPS = 1e-12  # a move must beat this to count as an improvement


def held_karp(d: np.ndarray, start: int = -1, end: int = -1):
    """Minimum-cost open Hamiltonian path by subset dynamic programming.

    ``d`` must be symmetric. ``start``/``end`` pin the endpoints
    (0-based); -1 leaves them free. Returns (cost, order) with a 0-based
    node list.
    """
    dd = np.asarray(d, dtype=np.float64).tolist()
    n = len(dd)
    size = 1 << n
    dp = [[_INF] * n for _ in range(size)]
    parent = [[-1] * n for _ in range(size)]
    if start < 0:
        for k in range(n):
            dp[1 << k][k] = 0.0
    else:
        dp[1 << start][start] = 0.0

    for mask in range(3, size):
        if mask & (mask - 1) == 0:
            continue  # singleton: initialization only
        dpm = dp[mask]
        par = parent[mask]
        for t in range(n):
            if not (mask >> t) & 1:
                continue
            pm = mask ^ (1 << t)
            dpp = dp[pm]
            dt = dd[t]
            best = _INF
            arg = -1
            for s in range(n):
                if not (pm >> s) & 1:
                    continue
                c = dpp[s] + dt[s]
                if c < best:
                    best = c
                    arg = s
            if arg >= 0:
                dpm[t] = best
                par[t] = arg

    full = size - 1
    if end >= 0:
        last = end
        cost = dp[full][end]
    else:
        cost = _INF
        last = -1
        for t in range(n):
            if dp[full][t] < cost:
                cost = dp[full][t]
                last = t
    order = []
    mask = full
    t = last
    while t >= 0:
        order.append(t)
        pt = parent[mask][t]
        mask ^= 1 << t
        t = pt
    order.reverse()
    return float(cost), order


def nearest_neighbor(d: np.ndarray, start: int, final: int = -1):
    """Greedy construction from ``start``; ``final`` (if >= 0) is reserved
    for the last position. Ties go to the smaller node index."""
    dd = np.asarray(d, dtype=np.float64).tolist()
    n = len(dd)
    visited = [False] * n
    visited[start] = True
    order = [start]
    if final >= 0:
        visited[final] = True
    cur = start
    remaining = n - 1 - (1 if final >= 0 else 0)
    for _ in range(remaining):
        row = dd[cur]
        best = _INF
        arg = -1
        for v in range(n):
            if not visited[v] and row[v] < best:
                best = row[v]
                arg = v
        order.append(arg)
        visited[arg] = True
        cur = arg
    if final >= 0:
        order.append(final)
    return order


def refine(d: np.ndarray, order, lock_ends: bool = False):
    """Best-improvement 2-opt + Or-opt local search on an open path.

    Alternates the two move families until neither improves; with
    ``lock_ends`` the first and last nodes stay in place. Returns the
    improved order (the input is not modified).
    """
    dd = np.asarray(d, dtype=np.float64).tolist()
    p = list(order)
    n = len(p)
    if n < 3:
        return p

    improved = True
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
                        delta += dd[p[i - 1]][p[j]] - dd[p[i - 1]][p[i]]
                    if j < n - 1:
                        delta += dd[p[i]][p[j + 1]] - dd[p[j]][p[j + 1]]
                    if delta < best:
                        best = delta
                        bi = i
                        bj = j
            if bi < 0:
                break
            p[bi:bj + 1] = p[bi:bj + 1][::-1]
            improved = True

        # Or-opt: relocate a segment of 1..3 nodes, orientation kept.
        while True:
            best = -_EPS
            bL = -1
            bs = -1
            bt = -1
            for L in (1, 2, 3):
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
                        rm = (dd[p[s - 1]][p[s + L]]
                              - dd[p[s - 1]][seg_a]
                              - dd[seg_b][p[s + L]])
                    elif s > 0:
                        rm = -dd[p[s - 1]][seg_a]
                    else:
                        rm = -dd[seg_b][p[s + L]]
                    for t in range(tlo, thi + 1):
                        if t == s:
                            continue  # original position: no-op
                        if t > 0:
                            left = p[t - 1] if t - 1 < s else p[t - 1 + L]
                        if t < m:
                            right = p[t] if t < s else p[t + L]
                        if 0 < t < m:
                            ins = dd[left][seg_a] + dd[seg_b][right] - dd[left][right]
                        elif t == 0:
                            ins = dd[seg_b][right]
                        else:
                            ins = dd[left][seg_a]
                        delta = rm + ins
                        if delta < best:
                            best = delta
                            bL = L
                            bs = s
                            bt = t
            if bL < 0:
                break
            seg = p[bs:bs + bL]
            rest = p[:bs] + p[bs + bL:]
            p = rest[:bt] + seg + rest[bt:]
            improved = True

    return p
