"""Mean narrative paths, shuffled controls, and the path action.

The mean path is the per-position average over narratives: point j is the
average of every story's j-th paragraph vector. Shuffled controls permute
each narrative's paragraphs independently before averaging, destroying the
storytelling order while keeping the same multiset of paragraphs. The
action of a path is alpha times the sum of squared successive
displacements.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, IncompleteSetError, ShapeMismatchError
from .lsa import EmbeddingSet


@dataclass(frozen=True)
class MeanPath:
    """Ordered mean paragraph points, one d-vector per position."""

    points: np.ndarray
    N: int
    shuffled: bool = False
    seed: int | None = None

    def __post_init__(self):
        if self.points.ndim != 2:
            raise DataError(f"mean path must be (n, d), got {self.points.shape}")
        if not np.all(np.isfinite(self.points)):
            raise DataError("mean path contains non-finite points")
        self.points.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dims(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class PermutationSet:
    """One paragraph permutation per narrative, 0-based positions.

    ``perms[i, j]`` is the source paragraph (0-based) placed at position j
    for narrative i.
    """

    perms: np.ndarray
    seed: int

    def __post_init__(self):
        if self.perms.ndim != 2:
            raise DataError("permutation set must be (N, n)")
        n = self.perms.shape[1]
        expected = np.arange(n)
        for i, row in enumerate(self.perms):
            if not np.array_equal(np.sort(row), expected):
                raise DataError(f"row {i} is not a permutation of 0..{n - 1}")
        self.perms.setflags(write=False)


@dataclass(frozen=True)
class ActionConfig:
    """Proportionality constant for the action; must be positive."""

    alpha: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")


def _sequential_mean(stack: np.ndarray) -> np.ndarray:
    # Strict i = 1..N accumulation so identical inputs give identical bits.
    acc = np.zeros(stack.shape[1:], dtype=np.float64)
    for i in range(stack.shape[0]):
        acc += stack[i]
    return acc / stack.shape[0]


def mean_path(e: EmbeddingSet) -> MeanPath:
    """Average the j-th paragraph vectors over all narratives."""
    if not np.all(np.isfinite(e.data)):
        raise IncompleteSetError("embedding set contains non-finite vectors")
    return MeanPath(points=_sequential_mean(np.asarray(e.data)), N=e.N,
                    shuffled=False, seed=None)


def make_permutations(N: int, n: int, seed: int) -> PermutationSet:
    """Independent uniform permutations per narrative, reproducible by seed."""
    if n < 2:
        raise DataError(f"permutations need n >= 2, got {n}")
    if N < 1:
        raise DataError(f"narrative count must be >= 1, got {N}")
    rng = np.random.default_rng(seed)
    perms = np.stack([rng.permutation(n) for _ in range(N)])
    return PermutationSet(perms=perms, seed=seed)


def shuffled_mean_path(e: EmbeddingSet, p: PermutationSet) -> MeanPath:
    """Average after permuting each narrative's paragraph order."""
    if p.perms.shape != (e.N, e.n):
        raise ShapeMismatchError(
            f"permutation set is {p.perms.shape}, embeddings need ({e.N}, {e.n})"
        )
    reordered = np.asarray(e.data)[np.arange(e.N)[:, None], p.perms, :]
    return MeanPath(points=_sequential_mean(reordered), N=e.N,
                    shuffled=True, seed=p.seed)


def action(points: np.ndarray, cfg: ActionConfig | None = None) -> float:
    """Sum of squared distances between successive points, times alpha."""
    cfg = cfg or ActionConfig()
    try:
        pts = np.asarray(points, dtype=np.float64)
    except ValueError as exc:
        raise DataError(f"points disagree on dimensionality: {exc}") from exc
    if pts.ndim == 1:
        pts = pts[None, :] if pts.size else pts.reshape(0, 0)
    if pts.ndim != 2:
        raise DataError(f"points must be a sequence of equal-length vectors, got shape {pts.shape}")
    if pts.shape[0] < 1:
        raise DataError("action needs at least one point")
    diffs = pts[1:] - pts[:-1]
    return float(cfg.alpha * np.sum(diffs * diffs))


def write_mean_path(
    mp: MeanPath,
    destination: str | Path,
    narrative_id: str = "mean",
) -> None:
    """Persist a mean path in the interchange format (method ``meanpath``)."""
    from .embedding_io import write_embeddings

    e = EmbeddingSet(narrative_ids=(narrative_id,),
                     data=np.asarray(mp.points)[None, :, :].copy())
    prov = f"N={mp.N} shuffled={str(mp.shuffled).lower()}"
    if mp.seed is not None:
        prov += f" seed={mp.seed}"
    write_embeddings(e, destination, method="meanpath", provenance=prov)
