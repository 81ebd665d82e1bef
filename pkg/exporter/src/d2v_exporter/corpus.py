"""Manifest-driven corpus loading.

The segmentation and tokenization rules mirror the ingester's documented
contract (paragraphs are blank-line separated blocks, tokens are lowercase
alphanumeric runs), so paragraph (i, j) here is the same text the manifest
producer saw.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

MANIFEST_FORMAT = "storytraj-corpus-manifest"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_START_MARKER_RE = re.compile(r"\*\*\*\s*START OF")
_END_MARKER_RE = re.compile(r"\*\*\*\s*END OF")

# conventional English stopword list, applied when removal is on
STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because
been before being below between both but by can did do does doing down
during each few for from further had has have having he her here hers
herself him himself his how i if in into is it its itself just me more
most my myself no nor not now of off on once only or other our ours
ourselves out over own s same she should so some such t than that the
their theirs them themselves then there these they this those through to
too under until up very was we were what when where which while who whom
why will with you your yours yourself yourselves
""".split())


class ExportError(Exception):
    pass


def segment_paragraphs(text: str) -> list[str]:
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


def strip_boilerplate(text: str) -> str:
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


def tokenize(text: str, remove_stopwords: bool = True) -> list[str]:
    tokens = _TOKEN_RE.findall(text.lower())
    if remove_stopwords:
        tokens = [t for t in tokens if t not in STOPWORDS]
    return tokens


def load_documents(manifest_path: str | Path, remove_stopwords: bool = True):
    """Token lists for every (narrative_id, j <= n) the manifest includes.

    Returns (doc_ids, doc_tokens, n) with doc_ids sorted by (id, j).
    """
    src = Path(manifest_path)
    if not src.is_file():
        raise ExportError(f"manifest not found: {src}")
    try:
        doc = json.loads(src.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ExportError(f"manifest is not valid JSON: {exc}") from exc
    if doc.get("format") != MANIFEST_FORMAT:
        raise ExportError(f"not a corpus manifest: {src}")
    n = int(doc["n"])

    doc_ids: list[tuple[str, int]] = []
    doc_tokens: list[list[str]] = []
    for entry in sorted(doc["narratives"], key=lambda e: e["id"]):
        if not entry.get("included"):
            continue
        path = entry.get("source_path")
        if not path or not Path(path).is_file():
            raise ExportError(
                f"narrative {entry['id']!r} has no readable source_path"
            )
        text = strip_boilerplate(Path(path).read_text(encoding="utf-8"))
        blocks = segment_paragraphs(text)
        if len(blocks) <= n:
            raise ExportError(
                f"narrative {entry['id']!r} now has {len(blocks)} paragraphs, "
                f"manifest expects more than {n}; re-run ingest"
            )
        for j, block in enumerate(blocks[:n], start=1):
            doc_ids.append((entry["id"], j))
            doc_tokens.append(tokenize(block, remove_stopwords))
    if not doc_ids:
        raise ExportError("manifest lists no included narratives")
    return doc_ids, doc_tokens, n
