import itertools
import json
from pathlib import Path

import numpy as np
import pytest

from storytraj.lsa import EmbeddingSet

DATA_DIR = Path(__file__).parent / "data"


def kruskal_weight(d: np.ndarray) -> float:
    """Independent MST oracle (Kruskal with union-find)."""
    n = d.shape[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = sorted((d[u, v], u, v) for u in range(n) for v in range(u + 1, n))
    total = 0.0
    for w, u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            total += w
    return total


def brute_force_path(d: np.ndarray, start=None, end=None):
    """Exhaustive open-path oracle; feasible for n <= 8."""
    n = d.shape[0]
    best_cost, best = np.inf, None
    for p in itertools.permutations(range(n)):
        if start is not None and p[0] != start:
            continue
        if end is not None and p[-1] != end:
            continue
        if start is None and end is None and p[0] > p[-1]:
            continue  # the reverse scores the same
        cost = sum(d[p[i], p[i + 1]] for i in range(n - 1))
        if cost < best_cost:
            best_cost, best = cost, p
    return best_cost, best


def drift_embeddings(N=200, n=50, dims=8, noise=0.3, seed=0):
    """Synthetic narratives marching along a fixed direction u.

    Paragraph j of every narrative sits at j*u plus isotropic noise of
    length at most noise*|u|, so the ordered mean path is a near-perfect
    chain while shuffled means collapse onto one cluster.
    """
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(dims)
    u_norm = float(np.linalg.norm(u))
    data = np.empty((N, n, dims))
    for i in range(N):
        for j in range(n):
            eps = rng.standard_normal(dims)
            eps *= (noise * u_norm * rng.uniform()) / np.linalg.norm(eps)
            data[i, j] = (j + 1) * u + eps
    ids = tuple(f"story{i:04d}" for i in range(N))
    return EmbeddingSet(narrative_ids=ids, data=data)


def toy_corpus_texts(stories=3, paragraphs=6, words_per_para=8, seed=0,
                     vocab=None):
    """Deterministic random-word narratives as {id: text}."""
    rng = np.random.default_rng(seed)
    vocab = vocab or [f"word{k}" for k in range(40)]
    texts = {}
    for s in range(stories):
        paras = []
        for _ in range(paragraphs):
            words = rng.choice(vocab, size=words_per_para)
            paras.append(" ".join(words))
        texts[f"tale{s:02d}"] = "\n\n".join(paras) + "\n"
    return texts


@pytest.fixture(scope="session")
def reference_sequences():
    with open(DATA_DIR / "reference_sequences.json") as fh:
        return json.load(fh)
