import json

import numpy as np
import pytest

from conftest import toy_corpus_texts
from storytraj.cli import main
from storytraj.embedding_io import write_embeddings
from storytraj.lsa import EmbeddingSet


def write_corpus_dir(tmp_path, stories=4, paragraphs=8, seed=0):
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir()
    for nid, text in toy_corpus_texts(stories, paragraphs, seed=seed).items():
        (corpus_dir / f"{nid}.txt").write_text(text, encoding="utf-8")
    return corpus_dir


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBasics:
    def test_help_exits_zero(self):
        with pytest.raises(SystemExit) as exc:
            main(["analyze", "--help"])
        assert exc.value.code == 0

    def test_missing_corpus_dir_is_config_error(self, tmp_path, capsys):
        missing = tmp_path / "nowhere"
        code, _, err = run_cli(capsys, "ingest", "--corpus-dir", str(missing),
                               "--out", str(tmp_path / "out"))
        assert code == 2
        assert str(missing) in err

    def test_unreadable_embeddings_is_config_error(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "analyze", "--embeddings", str(tmp_path / "no.tsv"),
            "--out", str(tmp_path / "out"))
        assert code == 2

    def test_bad_embeddings_content_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.tsv"
        bad.write_text("#emb v1 N=1 n=2 d=1 method=x\na\t1\t0.5\n")
        code, _, err = run_cli(capsys, "analyze", "--embeddings", str(bad),
                               "--out", str(tmp_path / "out"))
        assert code == 3

    def test_exact_solver_on_large_instance_is_solver_error(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        e = EmbeddingSet(narrative_ids=("a",),
                         data=rng.standard_normal((1, 20, 3)))
        src = tmp_path / "e.tsv"
        write_embeddings(e, src)
        code, _, err = run_cli(capsys, "analyze", "--embeddings", str(src),
                               "--solver", "exact", "--shuffle-seeds", "0",
                               "--out", str(tmp_path / "out"))
        assert code == 4


class TestPipeline:
    def test_full_run_and_schema(self, tmp_path, capsys):
        jsonschema = pytest.importorskip("jsonschema")
        from storytraj.report import REPORT_SCHEMA

        corpus_dir = write_corpus_dir(tmp_path, stories=4, paragraphs=9)
        out = tmp_path / "out"

        code, stdout, _ = run_cli(capsys, "ingest",
                                  "--corpus-dir", str(corpus_dir),
                                  "--n", "6", "--out", str(out))
        assert code == 0
        manifest = stdout.strip().splitlines()[-1]
        assert json.loads(open(manifest).read())["N"] == 4

        code, stdout, _ = run_cli(capsys, "embed-lsa",
                                  "--manifest", manifest,
                                  "--dims", "5", "--out", str(out))
        assert code == 0
        embeddings = stdout.strip().splitlines()[-1]

        code, stdout, _ = run_cli(capsys, "import-embeddings",
                                  "--file", embeddings,
                                  "--manifest", manifest)
        assert code == 0

        code, stdout, _ = run_cli(capsys, "analyze",
                                  "--embeddings", embeddings,
                                  "--shuffle-seeds", "0,1",
                                  "--out", str(out / "run"))
        assert code == 0
        paths = stdout.strip().splitlines()
        assert all(open(p) is not None for p in paths)
        report_path = [p for p in paths if p.endswith("report.json")][0]
        doc = json.loads(open(report_path).read())
        jsonschema.validate(doc, REPORT_SCHEMA)
        assert doc["config"]["embedding_method"] == "lsa"
        assert doc["config"]["N"] == 4
        assert doc["config"]["n"] == 6

        code, stdout, _ = run_cli(capsys, "report",
                                  "--report", report_path,
                                  "--out", str(out / "rerender"))
        assert code == 0
        rendered = stdout.strip().splitlines()
        assert any(p.endswith("atsp_ordered.txt") for p in rendered)
        assert (out / "rerender" / "atsp_ordered.txt").read_text() == \
            (out / "run" / "atsp_ordered.txt").read_text()

    def test_every_artifact_path_echoed(self, tmp_path, capsys):
        rng = np.random.default_rng(1)
        e = EmbeddingSet(narrative_ids=("a", "b"),
                         data=rng.standard_normal((2, 5, 3)))
        src = tmp_path / "e.tsv"
        write_embeddings(e, src)
        out = tmp_path / "out"
        code, stdout, _ = run_cli(capsys, "analyze", "--embeddings", str(src),
                                  "--shuffle-seeds", "1,2", "--out", str(out))
        assert code == 0
        echoed = set(stdout.strip().splitlines())
        on_disk = {str(p) for p in out.iterdir()}
        assert echoed == on_disk

    def test_determinism_modulo_timestamp(self, tmp_path, capsys):
        corpus_dir = write_corpus_dir(tmp_path, stories=3, paragraphs=8, seed=7)
        out = tmp_path / "out"
        run_cli(capsys, "ingest", "--corpus-dir", str(corpus_dir),
                "--n", "5", "--out", str(out))
        manifest = str(out / "corpus_manifest.json")

        args = ["analyze", "--manifest", manifest, "--dims", "4",
                "--svd-seed", "3", "--shuffle-seeds", "0,1,2"]
        code, _, _ = run_cli(capsys, *args, "--out", str(out / "a"))
        assert code == 0
        code, _, _ = run_cli(capsys, *args, "--out", str(out / "b"))
        assert code == 0

        a = (out / "a" / "report.json").read_text().splitlines()
        b = (out / "b" / "report.json").read_text().splitlines()
        diff = [(x, y) for x, y in zip(a, b) if x != y]
        assert len(a) == len(b)
        assert len(diff) == 1
        assert '"timestamp"' in diff[0][0]

    def test_pin_endpoints_flag(self, tmp_path, capsys):
        rng = np.random.default_rng(2)
        e = EmbeddingSet(narrative_ids=("a", "b", "c"),
                         data=rng.standard_normal((3, 6, 3)))
        src = tmp_path / "e.tsv"
        write_embeddings(e, src)
        out = tmp_path / "out"
        code, stdout, _ = run_cli(capsys, "analyze", "--embeddings", str(src),
                                  "--pin-endpoints", "--shuffle-seeds", "0",
                                  "--out", str(out))
        assert code == 0
        doc = json.loads((out / "report.json").read_text())
        assert doc["config"]["endpoint_mode"] == {"mode": "pinned", "start": 1,
                                                  "end": 6}
        seq = doc["ordered"]["atsp"]["sequence"]
        assert {seq[0], seq[-1]} == {1, 6}


class TestConfigFile:
    def test_config_file_supplies_options(self, tmp_path, capsys):
        corpus_dir = write_corpus_dir(tmp_path)
        out = tmp_path / "out"
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"corpus_dir = {corpus_dir}\nn = 5\nout = {out}\n")
        code, stdout, _ = run_cli(capsys, "ingest", "--config", str(cfg))
        assert code == 0
        assert (out / "corpus_manifest.json").exists()
        assert json.loads((out / "corpus_manifest.json").read_text())["n"] == 5

    def test_flags_override_config(self, tmp_path, capsys):
        corpus_dir = write_corpus_dir(tmp_path)
        out = tmp_path / "out"
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"corpus_dir = {corpus_dir}\nn = 5\nout = {out}\n")
        code, _, _ = run_cli(capsys, "ingest", "--config", str(cfg), "--n", "6")
        assert code == 0
        assert json.loads((out / "corpus_manifest.json").read_text())["n"] == 6

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("nonsense = 1\n")
        code, _, err = run_cli(capsys, "ingest", "--config", str(cfg),
                               "--corpus-dir", str(tmp_path))
        assert code == 2
        assert "nonsense" in err


class TestOutputDirEnv:
    def test_env_var_as_default_out(self, tmp_path, capsys, monkeypatch):
        corpus_dir = write_corpus_dir(tmp_path)
        out = tmp_path / "envout"
        monkeypatch.setenv("STORYTRAJ_OUT", str(out))
        code, _, _ = run_cli(capsys, "ingest", "--corpus-dir", str(corpus_dir),
                             "--n", "5")
        assert code == 0
        assert (out / "corpus_manifest.json").exists()

    def test_no_out_anywhere_is_config_error(self, tmp_path, capsys, monkeypatch):
        corpus_dir = write_corpus_dir(tmp_path)
        monkeypatch.delenv("STORYTRAJ_OUT", raising=False)
        code, _, err = run_cli(capsys, "ingest", "--corpus-dir", str(corpus_dir))
        assert code == 2
