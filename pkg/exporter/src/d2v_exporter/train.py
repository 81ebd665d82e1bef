"""PV-DBOW paragraph-vector training and interchange export.

Distributed bag of words: each paragraph's vector is trained to predict
the words it contains via negative sampling, with no word ordering
involved (the window setting is recorded for provenance but, as in the
plain DBOW mode of the usual trainers, does not enter the objective).
Training is fully deterministic for a fixed seed.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import ExportError, load_documents

FORMAT_HEADER = "#emb v1"


@dataclass
class TrainSpec:
    manifest: str
    dims: int = 300
    epochs: int = 40
    window: int = 5
    min_count: int = 2
    seed: int = 1
    remove_stopwords: bool = True
    negatives: int = 5
    alpha: float = 0.025
    min_alpha: float = 0.0001

    def __post_init__(self):
        if self.dims < 1:
            raise ExportError(f"dims must be >= 1, got {self.dims}")
        if self.epochs < 1:
            raise ExportError(f"epochs must be >= 1, got {self.epochs}")


def _build_vocab(doc_tokens, min_count):
    counts: dict[str, int] = {}
    for tokens in doc_tokens:
        for t in tokens:
            counts[t] = counts.get(t, 0) + 1
    words = sorted(w for w, c in counts.items() if c >= min_count)
    index = {w: i for i, w in enumerate(words)}
    freqs = np.array([counts[w] for w in words], dtype=np.float64)
    return index, freqs


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def train_vectors(spec: TrainSpec):
    """Train one vector per (narrative, paragraph); returns (doc_ids, D, n)."""
    doc_ids, doc_tokens, n = load_documents(spec.manifest,
                                            spec.remove_stopwords)
    vocab, freqs = _build_vocab(doc_tokens, spec.min_count)
    if not vocab:
        raise ExportError(
            f"no word reaches min_count={spec.min_count}; corpus too small"
        )
    docs = [np.array([vocab[t] for t in tokens if t in vocab], dtype=np.int64)
            for tokens in doc_tokens]

    rng = np.random.default_rng(spec.seed)
    num_docs = len(docs)
    D = (rng.random((num_docs, spec.dims)) - 0.5) / spec.dims
    O = np.zeros((len(vocab), spec.dims))

    # negative sampling from the unigram distribution ^ 0.75
    noise = freqs ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    span = max(1, spec.epochs - 1)
    for epoch in range(spec.epochs):
        alpha = spec.alpha - (spec.alpha - spec.min_alpha) * epoch / span
        for di in rng.permutation(num_docs):
            words = docs[di]
            if words.size == 0:
                continue
            v = D[di]
            for w in words:
                negs = np.searchsorted(noise_cdf, rng.random(spec.negatives))
                targets = np.concatenate(([w], negs))
                labels = np.zeros(spec.negatives + 1)
                labels[0] = 1.0
                outs = O[targets]
                g = alpha * (labels - _sigmoid(outs @ v))
                grad_v = g @ outs
                O[targets] += np.outer(g, v)
                v += grad_v
    return doc_ids, D, n


def write_interchange(doc_ids, vectors, n, destination, method="doc2vec",
                      provenance=""):
    """Write rows sorted by (id, j) atomically (temp file + rename)."""
    ids = sorted({nid for nid, _ in doc_ids})
    dims = vectors.shape[1]
    header = f"{FORMAT_HEADER} N={len(ids)} n={n} d={dims} method={method}"
    if provenance:
        header += f" provenance={provenance}"
    row_of = {pair: i for i, pair in enumerate(doc_ids)}

    dest = Path(destination)
    fd, tmp = tempfile.mkstemp(dir=dest.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header + "\n")
            for nid in ids:
                for j in range(1, n + 1):
                    row = vectors[row_of[(nid, j)]]
                    vals = "\t".join(repr(float(x)) for x in row)
                    fh.write(f"{nid}\t{j}\t{vals}\n")
        os.replace(tmp, dest)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def train_and_export(spec: TrainSpec, destination) -> Path:
    """Run the trainer and emit the interchange file; returns its path."""
    doc_ids, vectors, n = train_vectors(spec)
    if not np.all(np.isfinite(vectors)):
        raise ExportError("training produced non-finite vectors "
                          "(try a smaller learning rate)")
    prov = (f"dims={spec.dims} epochs={spec.epochs} window={spec.window} "
            f"min_count={spec.min_count} seed={spec.seed} "
            f"stopwords={'on' if spec.remove_stopwords else 'off'} "
            f"negatives={spec.negatives} alpha={spec.alpha}")
    write_interchange(doc_ids, vectors, n, destination, provenance=prov)
    return Path(destination)
