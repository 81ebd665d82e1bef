"""Self-describing interchange format for paragraph embeddings (v1).

Plain UTF-8, tab-separated. Line 1 is the header::

    #emb v1 N=<N> n=<n> d=<dims> method=<tag> [provenance=<free text>]

followed by one row per vector: narrative id, paragraph index j (1-based),
then d decimal floats. Rows are written sorted by (narrative id, j);
readers tolerate any row order. Floats are printed with Python's shortest
round-trip representation, so write-then-read is exact.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .corpus import Manifest
from .errors import (
    ConfigError,
    DataError,
    DimensionMismatchError,
    DuplicatePairError,
    InterchangeError,
    MissingPairError,
    NonFiniteValueError,
    VersionMismatchError,
)
from .lsa import EmbeddingSet

FORMAT_TAG = "#emb"
FORMAT_VERSION = "v1"


def write_embeddings(
    e: EmbeddingSet,
    destination: str | Path,
    method: str = "lsa",
    provenance: str = "",
) -> None:
    """Write an embedding set to ``destination`` atomically.

    The set is validated first; nothing is written when it is invalid.
    """
    if not np.all(np.isfinite(e.data)):
        raise DataError("refusing to write non-finite embedding vectors")
    if method != method.strip() or any(c.isspace() for c in method):
        raise DataError(f"method tag must be whitespace-free: {method!r}")
    for nid in e.narrative_ids:
        if "\t" in nid or "\n" in nid:
            raise DataError(f"narrative id contains tab/newline: {nid!r}")
    if "\n" in provenance:
        raise DataError("provenance must be a single line")

    header = (
        f"{FORMAT_TAG} {FORMAT_VERSION} N={e.N} n={e.n} d={e.dims} "
        f"method={method}"
    )
    if provenance:
        header += f" provenance={provenance}"

    dest = Path(destination)
    fd, tmp = tempfile.mkstemp(dir=dest.parent or Path("."), suffix=".tmp")
    try:
        row_of = {nid: i for i, nid in enumerate(e.narrative_ids)}
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(header + "\n")
            for nid in sorted(e.narrative_ids):
                i = row_of[nid]
                for j in range(1, e.n + 1):
                    vals = "\t".join(repr(float(x)) for x in e.data[i, j - 1])
                    fh.write(f"{nid}\t{j}\t{vals}\n")
        os.replace(tmp, dest)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_header(line: str, path: Path) -> tuple[int, int, int, str, str]:
    parts = line.rstrip("\n").split()
    if len(parts) < 2 or parts[0] != FORMAT_TAG:
        raise InterchangeError(f"{path}: not an embedding interchange file")
    if parts[1] != FORMAT_VERSION:
        raise VersionMismatchError(
            f"{path}: unsupported format version {parts[1]!r} "
            f"(expected {FORMAT_VERSION})"
        )
    fields: dict[str, str] = {}
    rest = line.rstrip("\n").split(None, 2)[2] if len(parts) > 2 else ""
    # provenance may contain spaces; it is always the final field.
    prov = ""
    if " provenance=" in " " + rest:
        head, _, prov = (" " + rest).partition(" provenance=")
        rest = head.strip()
    for tok in rest.split():
        if "=" not in tok:
            raise InterchangeError(f"{path}: malformed header field {tok!r}")
        key, _, val = tok.partition("=")
        fields[key] = val
    try:
        N = int(fields["N"])
        n = int(fields["n"])
        d = int(fields["d"])
        method = fields["method"]
    except (KeyError, ValueError) as exc:
        raise InterchangeError(f"{path}: incomplete header: {exc}") from exc
    if N < 1 or n < 1 or d < 1:
        raise InterchangeError(f"{path}: header sizes must be positive")
    return N, n, d, method, prov


def read_embeddings(source: str | Path) -> EmbeddingSet:
    """Read and fully validate an interchange file.

    Violations raise specific errors (missing pair, duplicate pair,
    dimension mismatch, non-finite value, version mismatch); nothing is
    silently repaired.
    """
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"embedding file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header:
            raise InterchangeError(f"{path}: empty file")
        N, n, d, _method, _prov = _parse_header(header, path)

        rows: dict[tuple[str, int], np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 3:
                raise InterchangeError(f"{path}:{lineno}: too few columns")
            nid = parts[0]
            try:
                j = int(parts[1])
            except ValueError as exc:
                raise InterchangeError(
                    f"{path}:{lineno}: paragraph index {parts[1]!r} is not "
                    "an integer"
                ) from exc
            if not 1 <= j <= n:
                raise InterchangeError(
                    f"{path}:{lineno}: paragraph index {j} outside 1..{n}"
                )
            if len(parts) - 2 != d:
                raise DimensionMismatchError(
                    f"{path}:{lineno}: expected {d} components, got "
                    f"{len(parts) - 2}"
                )
            try:
                vec = np.array([float(x) for x in parts[2:]])
            except ValueError as exc:
                raise InterchangeError(
                    f"{path}:{lineno}: unparseable float: {exc}"
                ) from exc
            if not np.all(np.isfinite(vec)):
                raise NonFiniteValueError(
                    f"{path}:{lineno}: non-finite component for "
                    f"({nid!r}, {j})"
                )
            if (nid, j) in rows:
                raise DuplicatePairError(
                    f"{path}:{lineno}: duplicate row for ({nid!r}, {j})"
                )
            rows[(nid, j)] = vec

    ids = sorted({nid for nid, _ in rows})
    for nid in ids:
        for j in range(1, n + 1):
            if (nid, j) not in rows:
                raise MissingPairError(nid, j)
    if len(ids) != N:
        raise InterchangeError(
            f"{path}: header declares N={N} narratives, file has {len(ids)}"
        )

    data = np.empty((N, n, d))
    for i, nid in enumerate(ids):
        for j in range(1, n + 1):
            data[i, j - 1] = rows[(nid, j)]
    return EmbeddingSet(narrative_ids=tuple(ids), data=data)


def read_method(source: str | Path) -> tuple[str, str]:
    """Return (method tag, provenance) from a file header without rows."""
    path = Path(source)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
    _, _, _, method, prov = _parse_header(header, path)
    return method, prov


def validate(e: EmbeddingSet, manifest: Manifest) -> list[str]:
    """Cross-check an embedding set against a corpus manifest.

    Returns a list of human-readable discrepancies; empty means the set
    covers exactly the manifest's included narratives at the right sizes.
    """
    report = []
    included = manifest.included_ids
    have = set(e.narrative_ids)
    want = set(included)
    for nid in sorted(have - want):
        report.append(f"unknown id: {nid!r} not an included narrative")
    for nid in sorted(want - have):
        report.append(f"missing id: no vectors for narrative {nid!r}")
    if e.N != manifest.N:
        report.append(f"count mismatch: {e.N} narratives embedded, manifest has {manifest.N}")
    if e.n != manifest.n:
        report.append(f"paragraph-count mismatch: {e.n} per narrative, manifest says {manifest.n}")
    return report
