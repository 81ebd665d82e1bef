"""Corpus ingestion: segmentation, tokenization, and story selection.

A corpus is built from plain-text narratives (one file per story). Only
stories with more than ``n`` paragraphs qualify; qualifying stories are
truncated to their first ``n`` paragraphs.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, DataError, EmptyCorpusError

MANIFEST_FORMAT = "storytraj-corpus-manifest"
MANIFEST_VERSION = 1

# Unicode alphanumeric runs; underscore is a word char for re but not
# alphanumeric, so it is excluded explicitly.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Project Gutenberg boilerplate fences.
_START_MARKER_RE = re.compile(r"\*\*\*\s*START OF")
_END_MARKER_RE = re.compile(r"\*\*\*\s*END OF")


@dataclass(frozen=True)
class RawNarrative:
    """One source story: unique id, origin path, full UTF-8 text."""

    id: str
    source_path: str | None
    text: str


@dataclass(frozen=True)
class ParagraphText:
    """A single paragraph with its 1-based position inside the story."""

    narrative_id: str
    index: int
    text: str
    tokens: tuple[str, ...]


@dataclass
class Corpus:
    """First-n paragraphs of every qualifying narrative.

    ``paragraphs_by_id`` holds exactly ``n`` paragraphs per included story;
    ``excluded`` records (id, paragraph count) for stories that were too
    short; ``source_paths`` covers all ids seen, included or not, so a
    manifest can be written for downstream tools.
    """

    paragraphs_by_id: dict[str, list[ParagraphText]]
    n: int
    excluded: list[tuple[str, int]] = field(default_factory=list)
    source_paths: dict[str, str | None] = field(default_factory=dict)
    paragraph_counts: dict[str, int] = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.paragraphs_by_id)

    @property
    def ids(self) -> list[str]:
        return sorted(self.paragraphs_by_id)

    def iter_documents(self):
        """Yield (narrative_id, j, ParagraphText) in (id, j) order."""
        for nid in self.ids:
            for para in self.paragraphs_by_id[nid]:
                yield nid, para.index, para


def segment_paragraphs(text: str) -> list[str]:
    """Split text into paragraphs: maximal runs of non-blank lines.

    One or more blank (whitespace-only) lines separate paragraphs. Each
    paragraph is trimmed as a block; internal line breaks are preserved.
    """
    paragraphs = []
    current: list[str] = []
    for line in text.splitlines():
        if line.strip():
            current.append(line)
        elif current:
            paragraphs.append("\n".join(current).strip())
            current = []
    if current:
        paragraphs.append("\n".join(current).strip())
    return paragraphs


def tokenize(text: str, stopwords: set[str] | None = None) -> list[str]:
    """Lowercase and split on non-alphanumeric characters.

    Empty fragments are dropped. When a stopword set is supplied, tokens
    found in it (case-insensitive) are dropped too.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    if stopwords:
        drop = {w.lower() for w in stopwords}
        tokens = [t for t in tokens if t not in drop]
    return tokens


def strip_boilerplate(text: str) -> str:
    """Keep only the text enclosed by Gutenberg START/END marker lines.

    When no marker is present the text is returned unchanged; a lone START
    or END marker trims one side only.
    """
    lines = text.splitlines(keepends=True)
    start = None
    end = None
    for i, line in enumerate(lines):
        if start is None and _START_MARKER_RE.search(line):
            start = i
        elif _END_MARKER_RE.search(line):
            end = i
            break
    if start is None and end is None:
        return text
    lo = 0 if start is None else start + 1
    hi = len(lines) if end is None else end
    return "".join(lines[lo:hi])


def load_corpus(
    sources: list[RawNarrative],
    n: int = 50,
    stopwords: set[str] | None = None,
    min_paragraphs: int | None = None,
) -> Corpus:
    """Select stories with more than ``n`` paragraphs and truncate to ``n``.

    ``min_paragraphs`` raises the qualification bar above the default
    n + 1. Boilerplate is stripped before segmentation. Narratives are
    ordered by id; shorter stories land in ``Corpus.excluded``. Raises
    EmptyCorpusError when nothing qualifies.
    """
    if n < 2:
        raise DataError(f"paragraphs per story must be >= 2, got {n}")
    required = n + 1 if min_paragraphs is None else min_paragraphs
    if required < n + 1:
        raise DataError(
            f"min_paragraphs must be at least n + 1 = {n + 1}, got {required}"
        )
    seen: set[str] = set()
    included: dict[str, list[ParagraphText]] = {}
    excluded: list[tuple[str, int]] = []
    source_paths: dict[str, str | None] = {}
    counts: dict[str, int] = {}
    for narr in sorted(sources, key=lambda s: s.id):
        if narr.id in seen:
            raise DataError(f"duplicate narrative id {narr.id!r}")
        seen.add(narr.id)
        source_paths[narr.id] = narr.source_path
        blocks = segment_paragraphs(strip_boilerplate(narr.text))
        counts[narr.id] = len(blocks)
        if len(blocks) < required:
            excluded.append((narr.id, len(blocks)))
            continue
        included[narr.id] = [
            ParagraphText(
                narrative_id=narr.id,
                index=j,
                text=block,
                tokens=tuple(tokenize(block, stopwords)),
            )
            for j, block in enumerate(blocks[:n], start=1)
        ]
    if not included:
        raise EmptyCorpusError(
            f"no narrative has at least {required} paragraphs "
            f"({len(excluded)} candidates examined)"
        )
    return Corpus(paragraphs_by_id=included, n=n, excluded=excluded,
                  source_paths=source_paths, paragraph_counts=counts)


def read_sources_dir(corpus_dir: str | Path) -> list[RawNarrative]:
    """Load every .txt file in a directory; the filename stem is the id."""
    root = Path(corpus_dir)
    if not root.is_dir():
        raise ConfigError(f"corpus directory not found: {root}")
    sources = []
    for path in sorted(root.glob("*.txt")):
        sources.append(RawNarrative(id=path.stem, source_path=str(path),
                                    text=path.read_text(encoding="utf-8")))
    if not sources:
        raise DataError(f"no .txt files in {root}")
    return sources


def read_sources_manifest(list_path: str | Path) -> list[RawNarrative]:
    """Load narratives from a text file listing one path per line."""
    listing = Path(list_path)
    if not listing.is_file():
        raise ConfigError(f"source list not found: {listing}")
    sources = []
    for raw in listing.read_text(encoding="utf-8").splitlines():
        entry = raw.strip()
        if not entry or entry.startswith("#"):
            continue
        path = Path(entry)
        if not path.is_file():
            raise DataError(f"listed narrative not found: {path}")
        sources.append(RawNarrative(id=path.stem, source_path=str(path),
                                    text=path.read_text(encoding="utf-8")))
    if not sources:
        raise DataError(f"no narrative paths listed in {listing}")
    return sources


def write_manifest(corpus: Corpus, dest: str | Path) -> None:
    """Write the corpus manifest JSON consumed by exporters and validators."""
    entries = []
    for nid in sorted(corpus.source_paths):
        inc = nid in corpus.paragraphs_by_id
        entries.append({
            "id": nid,
            "source_path": corpus.source_paths[nid],
            "paragraphs_total": corpus.paragraph_counts.get(nid),
            "included": inc,
        })
    doc = {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "n": corpus.n,
        "N": corpus.N,
        "narratives": entries,
    }
    Path(dest).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class Manifest:
    n: int
    N: int
    narratives: list[dict]

    @property
    def included_ids(self) -> list[str]:
        return sorted(e["id"] for e in self.narratives if e["included"])


def read_manifest(path: str | Path) -> Manifest:
    src = Path(path)
    if not src.is_file():
        raise ConfigError(f"manifest not found: {src}")
    try:
        doc = json.loads(src.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"manifest is not valid JSON: {src}: {exc}") from exc
    if doc.get("format") != MANIFEST_FORMAT:
        raise DataError(f"not a corpus manifest: {src}")
    if doc.get("version") != MANIFEST_VERSION:
        raise DataError(f"unsupported manifest version {doc.get('version')!r}")
    return Manifest(n=doc["n"], N=doc["N"], narratives=doc["narratives"])
