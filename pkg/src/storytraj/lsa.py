"""Log-entropy LSA: weighted word-document matrix and truncated SVD.

Each paragraph is one document, ordered (narrative id, paragraph index).
Words are weighted by 1 + sum_k Q_kl ln(Q_kl) / ln(M) where Q_kl is the
per-word probability of landing in document k; weighted counts are
S_l * ln(w_kl + 1). Paragraph vectors are rows of U scaled by the singular
values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus
from .errors import (
    ConfigError,
    DataError,
    EmptyVocabularyError,
    SvdConvergenceError,
)


@dataclass(frozen=True)
class TermDocMatrix:
    """Sparse document x word count matrix with its vocabulary map.

    Rows follow ``doc_ids``: all paragraphs of the lexically first
    narrative, then the next, paragraph index ascending within each.
    """

    counts: sp.csr_matrix
    vocabulary: dict[str, int]
    doc_ids: tuple[tuple[str, int], ...]

    @property
    def M(self) -> int:
        return self.counts.shape[0]


@dataclass(frozen=True)
class SvdFactors:
    """Rank-d factorization: U (docs x d), sigma (d), V (vocab x d)."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    d: int

    def __post_init__(self):
        if self.U.shape[1] != self.d or self.V.shape[1] != self.d:
            raise DataError("factor shapes disagree with d")
        if np.any(np.diff(self.sigma) > 0) or np.any(self.sigma < 0):
            raise DataError("singular values must be non-negative and non-increasing")


@dataclass(frozen=True)
class EmbeddingSet:
    """One d-vector per (narrative, paragraph), as an (N, n, d) array.

    Narrative order follows ``narrative_ids``; the paragraph axis is the
    1-based index j minus one.
    """

    narrative_ids: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3:
            raise DataError(f"embedding array must be (N, n, d), got {self.data.shape}")
        if len(self.narrative_ids) != self.data.shape[0]:
            raise DataError("narrative id count disagrees with the data array")
        if len(set(self.narrative_ids)) != len(self.narrative_ids):
            raise DataError("narrative ids must be unique")
        if self.data.shape[0] < 1 or self.data.shape[1] < 1 or self.data.shape[2] < 1:
            raise DataError("embedding set must be non-empty")
        if not np.all(np.isfinite(self.data)):
            raise DataError("embedding vectors must be finite")
        self.data.setflags(write=False)

    @property
    def N(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def dims(self) -> int:
        return self.data.shape[2]

    def vector(self, narrative_id: str, j: int) -> np.ndarray:
        """The embedding of paragraph j (1-based) of one narrative."""
        try:
            i = self.narrative_ids.index(narrative_id)
        except ValueError:
            raise DataError(f"unknown narrative id {narrative_id!r}") from None
        if not 1 <= j <= self.n:
            raise DataError(f"paragraph index {j} outside 1..{self.n}")
        return self.data[i, j - 1]

    def items(self):
        for i, nid in enumerate(self.narrative_ids):
            for j in range(1, self.n + 1):
                yield (nid, j), self.data[i, j - 1]


def build_term_doc(corpus: Corpus, min_doc_freq: int = 1) -> TermDocMatrix:
    """Count words per paragraph-document.

    Words appearing in fewer than ``min_doc_freq`` documents are removed;
    removing everything raises EmptyVocabularyError. Vocabulary columns are
    sorted alphabetically.
    """
    if corpus.N < 1:
        raise DataError("corpus is empty")
    doc_ids = []
    doc_counts = []
    doc_freq: dict[str, int] = {}
    for nid, j, para in corpus.iter_documents():
        doc_ids.append((nid, j))
        counts: dict[str, int] = {}
        for tok in para.tokens:
            counts[tok] = counts.get(tok, 0) + 1
        doc_counts.append(counts)
        for tok in counts:
            doc_freq[tok] = doc_freq.get(tok, 0) + 1

    vocab_words = sorted(w for w, df in doc_freq.items() if df >= min_doc_freq)
    if not vocab_words:
        raise EmptyVocabularyError(
            f"no word appears in at least {min_doc_freq} documents"
        )
    vocabulary = {w: i for i, w in enumerate(vocab_words)}

    rows, cols, data = [], [], []
    for k, counts in enumerate(doc_counts):
        for tok, c in counts.items():
            col = vocabulary.get(tok)
            if col is not None:
                rows.append(k)
                cols.append(col)
                data.append(c)
    counts = sp.csr_matrix(
        (data, (rows, cols)),
        shape=(len(doc_ids), len(vocabulary)),
        dtype=np.float64,
    )
    return TermDocMatrix(counts=counts, vocabulary=vocabulary,
                         doc_ids=tuple(doc_ids))


def entropy_weights(m: TermDocMatrix) -> np.ndarray:
    """Per-word weights S_l = 1 + sum_k Q_kl ln(Q_kl) / ln(M), in [0, 1].

    Q_kl is the word's count in document k over its corpus-wide count;
    0 ln 0 counts as 0. Requires at least two documents.
    """
    M = m.M
    if M < 2:
        raise DataError(f"entropy weighting needs at least 2 documents, got {M}")
    csc = m.counts.tocsc()
    word_totals = np.asarray(csc.sum(axis=0)).ravel()
    # Every vocabulary word occurs somewhere, so word_totals > 0.
    q = csc.data / np.repeat(word_totals, np.diff(csc.indptr))
    contrib = q * np.log(q)
    entropy = np.add.reduceat(
        np.append(contrib, 0.0),
        csc.indptr[:-1],
    )
    entropy[np.diff(csc.indptr) == 0] = 0.0
    return 1.0 + entropy / np.log(M)


def weight_matrix(m: TermDocMatrix, s: np.ndarray) -> sp.csr_matrix:
    """Apply W_kl = S_l * ln(w_kl + 1) on the stored nonzeros.

    The sparsity pattern of the counts is preserved exactly.
    """
    if s.shape != (m.counts.shape[1],):
        raise DataError(
            f"weight vector length {s.shape} disagrees with vocabulary size "
            f"{m.counts.shape[1]}"
        )
    # csr stores column indices per nonzero; map each to its word weight.
    csr = m.counts.tocsr().copy()
    csr.data = s[csr.indices] * np.log1p(csr.data)
    return csr


def truncated_svd(
    W: sp.spmatrix | np.ndarray,
    d: int,
    seed: int = 0,
    oversample: int = 10,
    base_power_iters: int = 2,
    tol: float = 1e-10,
    max_sweeps: int = 500,
) -> SvdFactors:
    """Seeded randomized truncated SVD of W, refined until converged.

    A Gaussian range finder with ``oversample`` extra columns and
    ``base_power_iters`` power iterations seeds a blocked subspace
    iteration; sweeps continue until the d leading singular values change
    by less than ``tol`` (relative) on two consecutive sweeps. Raises
    SvdConvergenceError with diagnostics when ``max_sweeps`` is exhausted.
    """
    M, V = W.shape
    if d < 1:
        raise ConfigError(f"dimensionality must be >= 1, got {d}")
    if d > min(M, V):
        raise ConfigError(
            f"dimensionality {d} exceeds min(documents, vocabulary) = {min(M, V)}"
        )
    k = min(d + oversample, min(M, V))
    rng = np.random.default_rng(seed)

    def project(Q):
        # (k, V) dense image of the current subspace; sparse-safe.
        return np.asarray((W.T @ Q).T)

    Q = np.linalg.qr(np.asarray(W @ rng.standard_normal((V, k))))[0]
    for _ in range(base_power_iters):
        Q = np.linalg.qr(np.asarray(W.T @ Q))[0]
        Q = np.linalg.qr(np.asarray(W @ Q))[0]

    full_subspace = k == min(M, V)
    prev = None
    stable = 0
    last_change = np.inf
    for sweep in range(max_sweeps):
        ritz = np.linalg.svd(project(Q), compute_uv=False)[:d]
        if full_subspace:
            break
        if prev is not None:
            last_change = float(np.max(np.abs(ritz - prev) / np.maximum(prev, 1e-300)))
            if last_change < tol:
                stable += 1
                if stable >= 2:
                    break
            else:
                stable = 0
        prev = ritz
        Q = np.linalg.qr(np.asarray(W.T @ Q))[0]
        Q = np.linalg.qr(np.asarray(W @ Q))[0]
    else:
        raise SvdConvergenceError(
            f"singular values did not stabilize below {tol} within "
            f"{max_sweeps} sweeps (last relative change {last_change:.3e})",
            sweeps=max_sweeps,
            last_change=last_change,
        )

    Ub, sigma, Vt = np.linalg.svd(project(Q), full_matrices=False)
    U = Q @ Ub[:, :d]
    if not np.all(np.isfinite(sigma)):
        raise SvdConvergenceError("singular values are not finite")
    return SvdFactors(U=U, sigma=sigma[:d].copy(), V=Vt[:d].T.copy(), d=d)


def embed_paragraphs(
    f: SvdFactors,
    doc_ids: tuple[tuple[str, int], ...],
    scale_by_sigma: bool = True,
    normalize: bool = False,
) -> EmbeddingSet:
    """Turn SVD factors into per-paragraph vectors.

    Row order of U must match ``doc_ids``. Vectors are U rows scaled
    componentwise by the singular values (set ``scale_by_sigma=False`` for
    raw U coordinates); ``normalize`` rescales each vector to unit length,
    leaving exact zero vectors alone.
    """
    if f.U.shape[0] != len(doc_ids):
        raise DataError("factor row count disagrees with the document layout")
    coords = f.U * f.sigma if scale_by_sigma else f.U.copy()
    if normalize:
        norms = np.linalg.norm(coords, axis=1, keepdims=True)
        nonzero = norms[:, 0] > 0
        coords[nonzero] /= norms[nonzero]

    ids = sorted({nid for nid, _ in doc_ids})
    n_by_id: dict[str, int] = {}
    for nid, j in doc_ids:
        n_by_id[nid] = max(n_by_id.get(nid, 0), j)
    n = n_by_id[ids[0]]
    if any(v != n for v in n_by_id.values()):
        raise DataError("narratives disagree on paragraph count")
    index = {pair: row for row, pair in enumerate(doc_ids)}
    if len(index) != len(doc_ids):
        raise DataError("duplicate (narrative, paragraph) pairs in layout")
    data = np.empty((len(ids), n, f.d))
    for i, nid in enumerate(ids):
        for j in range(1, n + 1):
            row = index.get((nid, j))
            if row is None:
                raise DataError(f"layout is missing paragraph ({nid!r}, {j})")
            data[i, j - 1] = coords[row]
    return EmbeddingSet(narrative_ids=tuple(ids), data=data)
