import json
from pathlib import Path

import numpy as np
import pytest

MANIFEST_FORMAT = "storytraj-corpus-manifest"


def make_story(rng, pool, paragraphs=7, words=12):
    return "\n\n".join(" ".join(rng.choice(pool, size=words))
                       for _ in range(paragraphs))


def build_toy_corpus(root: Path, duplicate=False, n=6, seed=0):
    """Three distinct-vocabulary stories (plus an optional duplicate) and a
    hand-written manifest in the documented format."""
    rng = np.random.default_rng(seed)
    pools = {
        "alpha": [f"al{k}" for k in range(15)],
        "bravo": [f"br{k}" for k in range(15)],
        "delta": [f"de{k}" for k in range(15)],
    }
    texts = {nid: make_story(rng, pool, paragraphs=n + 1)
             for nid, pool in pools.items()}
    if duplicate:
        texts["delta2"] = texts["delta"]

    entries = []
    for nid in sorted(texts):
        path = root / f"{nid}.txt"
        path.write_text(texts[nid], encoding="utf-8")
        entries.append({"id": nid, "source_path": str(path),
                        "paragraphs_total": n + 1, "included": True})
    manifest = {"format": MANIFEST_FORMAT, "version": 1, "n": n,
                "N": len(entries), "narratives": entries}
    mpath = root / "corpus_manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return mpath


@pytest.fixture
def toy_manifest(tmp_path):
    return build_toy_corpus(tmp_path)


@pytest.fixture
def toy_manifest_with_duplicate(tmp_path):
    return build_toy_corpus(tmp_path, duplicate=True)
