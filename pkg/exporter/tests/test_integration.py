"""End-to-end integration through the primary pipeline's CLI surface.

The exporter's interchange file must import cleanly (read + validate, zero
discrepancies) and drive a full ordered-vs-shuffled analysis run.
"""

import json
import subprocess
import sys

import pytest

from d2v_exporter.train import TrainSpec, train_and_export

pytest.importorskip("storytraj", reason="primary pipeline not installed")


def run_primary(*argv):
    return subprocess.run([sys.executable, "-m", "storytraj.cli", *argv],
                          capture_output=True, text=True)


def test_exporter_file_flows_through_pipeline(toy_manifest, tmp_path):
    vectors = tmp_path / "vectors.tsv"
    spec = TrainSpec(manifest=str(toy_manifest), dims=16, epochs=20, seed=3)
    train_and_export(spec, vectors)

    imported = run_primary("import-embeddings", "--file", str(vectors),
                           "--manifest", str(toy_manifest))
    assert imported.returncode == 0, imported.stderr
    assert imported.stderr.strip() == ""  # zero discrepancies

    out = tmp_path / "run"
    analyzed = run_primary("analyze", "--embeddings", str(vectors),
                           "--shuffle-seeds", "0,1,2", "--out", str(out))
    assert analyzed.returncode == 0, analyzed.stderr
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["embedding_method"] == "doc2vec"
    assert report["config"]["N"] == 3
    assert report["config"]["n"] == 6
    assert len(report["shuffled"]) == 3
    assert (out / "atsp_ordered.txt").exists()
    assert (out / "mst_ordered.dot").exists()


def test_validation_catches_wrong_manifest(toy_manifest, tmp_path):
    vectors = tmp_path / "vectors.tsv"
    train_and_export(TrainSpec(manifest=str(toy_manifest), dims=8, epochs=5,
                               seed=1), vectors)

    doc = json.loads(toy_manifest.read_text())
    doc["N"] = 2
    doc["narratives"] = doc["narratives"][:2]
    wrong = tmp_path / "wrong_manifest.json"
    wrong.write_text(json.dumps(doc))

    imported = run_primary("import-embeddings", "--file", str(vectors),
                           "--manifest", str(wrong))
    assert imported.returncode == 3
    assert "unknown id" in imported.stderr
