"""Distance matrices, minimum spanning trees, and open-path TSP solvers.

Nodes are paragraph positions and are 1-based everywhere in the public
types; the kernels work 0-based internally. The default metric is squared
Euclidean, matching the action's squared displacements; plain Euclidean is
available because orderings under the two can differ (the MST cannot:
squaring is monotone).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from . import kernels
from .errors import (
    ConfigError,
    DataError,
    InvalidPermutationError,
    SizeLimitError,
)

METRICS = ("squared_euclidean", "euclidean")
EXACT_LIMIT = 18  # subset DP: ~n^2 * 2^n states


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distances with a zero diagonal."""

    entries: np.ndarray
    metric: str

    def __post_init__(self):
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DataError(f"distance matrix must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DataError("distances must be finite")
        if np.any(m < 0) or np.any(np.diag(m) != 0) or not np.array_equal(m, m.T):
            raise DataError("distance matrix must be symmetric, non-negative, "
                            "and zero on the diagonal")
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}; choose from {METRICS}")
        m.setflags(write=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def to_dict(self) -> dict:
        return {"n": self.n, "metric": self.metric,
                "entries": self.entries.tolist()}


@dataclass(frozen=True)
class Tree:
    """A spanning tree as 1-based undirected edges."""

    n: int
    edges: frozenset[tuple[int, int]]
    total_weight: float

    def __post_init__(self):
        if len(self.edges) != self.n - 1:
            raise DataError(
                f"a spanning tree on {self.n} nodes needs {self.n - 1} edges, "
                f"got {len(self.edges)}"
            )
        # n-1 edges and no cycle <=> spanning tree; union-find check
        parent = list(range(self.n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise DataError(f"edge ({a}, {b}) outside 1..{self.n}")
            ra, rb = find(a), find(b)
            if ra == rb:
                raise DataError(f"edges contain a cycle through ({a}, {b})")
            parent[ra] = rb

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": sorted(self.edges),
                "total_weight": self.total_weight}


@dataclass(frozen=True)
class PathOrder:
    """A visiting order (permutation of 1..n) with its path cost."""

    order: tuple[int, ...]
    cost: float
    solver: str
    endpoints: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        mode = ({"mode": "pinned", "start": self.endpoints[0], "end": self.endpoints[1]}
                if self.endpoints else {"mode": "free"})
        return {"order": list(self.order), "cost": self.cost,
                "solver": self.solver, "endpoint_mode": mode}


def distance_matrix(points: np.ndarray, metric: str = "squared_euclidean") -> DistanceMatrix:
    """Pairwise distances; each pair is computed once and mirrored."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise DataError(f"points must be (n, d), got {pts.shape}")
    if pts.shape[0] < 2:
        raise DataError("need at least two points")
    if metric == "squared_euclidean":
        condensed = pdist(pts, "sqeuclidean")
    elif metric == "euclidean":
        condensed = pdist(pts, "euclidean")
    else:
        raise ConfigError(f"unknown metric {metric!r}; choose from {METRICS}")
    return DistanceMatrix(entries=squareform(condensed), metric=metric)


def mst(dm: DistanceMatrix) -> Tree:
    """Minimum spanning tree by Prim's algorithm.

    Equal-weight choices resolve toward the lexicographically smaller
    (min endpoint, max endpoint) edge, so the result is deterministic.
    """
    d = dm.entries
    n = dm.n
    if n < 2:
        raise DataError("spanning tree needs at least two nodes")
    in_tree = np.zeros(n, dtype=bool)
    key = np.full(n, np.inf)
    parent = np.full(n, -1)
    in_tree[0] = True
    key[1:] = d[0, 1:]
    parent[1:] = 0
    edges = []
    total = 0.0
    for _ in range(n - 1):
        pick = -1
        for v in range(n):
            if in_tree[v]:
                continue
            if pick < 0 or key[v] < key[pick]:
                pick = v
            elif key[v] == key[pick]:
                ev = (min(v, parent[v]), max(v, parent[v]))
                ep = (min(pick, parent[pick]), max(pick, parent[pick]))
                if ev < ep:
                    pick = v
        u = int(parent[pick])
        edges.append((min(u, pick) + 1, max(u, pick) + 1))
        total += float(key[pick])
        in_tree[pick] = True
        for v in range(n):
            if in_tree[v]:
                continue
            w = d[pick, v]
            if w < key[v]:
                key[v] = w
                parent[v] = pick
            elif w == key[v]:
                new = (min(pick, v), max(pick, v))
                old = (min(int(parent[v]), v), max(int(parent[v]), v))
                if new < old:
                    parent[v] = pick
    return Tree(n=n, edges=frozenset(edges), total_weight=total)


def _check_endpoints(endpoints: tuple[int, int] | None, n: int) -> tuple[int, int]:
    if endpoints is None:
        return -1, -1
    a, b = endpoints
    if not (1 <= a <= n and 1 <= b <= n) or a == b:
        raise ConfigError(f"pinned endpoints must be two distinct nodes in 1..{n}, got {endpoints}")
    return a - 1, b - 1


def atsp_exact(dm: DistanceMatrix, endpoints: tuple[int, int] | None = None) -> PathOrder:
    """Globally minimal open Hamiltonian path (subset dynamic programming).

    Refuses instances with more than EXACT_LIMIT nodes; use the heuristic
    there.
    """
    n = dm.n
    if n > EXACT_LIMIT:
        raise SizeLimitError(
            f"exact path solver is limited to {EXACT_LIMIT} nodes, got {n}"
        )
    a, b = _check_endpoints(endpoints, n)
    cost, order0 = kernels.held_karp(dm.entries, a, b)
    order = tuple(v + 1 for v in order0)
    return PathOrder(order=order, cost=_path_cost_raw(order, dm),
                     solver="exact", endpoints=endpoints)


def atsp_heuristic(
    dm: DistanceMatrix,
    endpoints: tuple[int, int] | None = None,
    seed: int = 0,
) -> PathOrder:
    """Best of nearest-neighbor starts, each refined by 2-opt and Or-opt.

    Free mode starts a construction from every node; pinned mode builds
    from both pinned ends. Candidates are ranked by (cost, order) so the
    result is deterministic; the algorithm uses no randomness, so ``seed``
    only forms part of the run record.
    """
    del seed  # accepted for the run record; the search is deterministic
    n = dm.n
    if n < 2:
        raise DataError("need at least two nodes")
    a, b = _check_endpoints(endpoints, n)
    d = dm.entries

    candidates = []
    if endpoints is None:
        for start in range(n):
            order0 = kernels.nearest_neighbor(d, start, -1)
            candidates.append(kernels.refine(d, order0, False))
    else:
        fwd = kernels.nearest_neighbor(d, a, b)
        candidates.append(kernels.refine(d, fwd, True))
        rev = kernels.nearest_neighbor(d, b, a)
        candidates.append(kernels.refine(d, rev[::-1], True))

    best_order: tuple[int, ...] | None = None
    best_cost = np.inf
    for cand in candidates:
        order = tuple(v + 1 for v in cand)
        cost = _path_cost_raw(order, dm)
        if cost < best_cost or (cost == best_cost and order < best_order):
            best_cost = cost
            best_order = order
    return PathOrder(order=best_order, cost=best_cost, solver="heuristic",
                     endpoints=endpoints)


def _path_cost_raw(order: tuple[int, ...], dm: DistanceMatrix) -> float:
    idx = np.asarray(order) - 1
    return float(np.sum(dm.entries[idx[:-1], idx[1:]]))


def path_cost(order: tuple[int, ...] | list[int], dm: DistanceMatrix) -> float:
    """Sum of successive edge weights along ``order`` (1-based nodes)."""
    seq = tuple(int(v) for v in order)
    if sorted(seq) != list(range(1, dm.n + 1)):
        raise InvalidPermutationError(
            f"order must be a permutation of 1..{dm.n}"
        )
    return _path_cost_raw(seq, dm)
