"""Command-line entry point.

Subcommands: ingest, embed-lsa, import-embeddings, analyze, report.
Options can come from a key=value config file (--config); command-line
flags override file values. Every artifact path written is echoed on
stdout, one per line. Exit codes: 0 ok, 2 config error, 3 data error,
4 solver error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__, corpus as corpus_mod, embedding_io, lsa
from .errors import ConfigError, DataError, StorytrajError
from .graph import Tree
from .report import ExperimentConfig, export_dot, load_report, render_table, run_experiment, write_artifacts

OUTPUT_DIR_ENV = "STORYTRAJ_OUT"


def _parse_config_file(path: str) -> dict[str, str]:
    src = Path(path)
    if not src.is_file():
        raise ConfigError(f"config file not found: {src}")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(src.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{src}:{lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _walk_actions(parser: argparse.ArgumentParser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for child in action.choices.values():
                yield from _walk_actions(child)
        else:
            yield action


def _explicit_keys(argv: list[str]) -> set[str]:
    """Option dests the user actually passed on the command line."""
    probe = build_parser()
    for action in _walk_actions(probe):
        action.default = argparse.SUPPRESS
    ns, _ = probe.parse_known_args(argv)
    return set(vars(ns))


def _coerce(action: argparse.Action, raw: str):
    if isinstance(action, argparse._StoreTrueAction):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if action.type is not None:
        try:
            return action.type(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {action.dest}: {raw!r} ({exc})") from exc
    if action.choices and raw not in action.choices:
        raise ConfigError(
            f"bad value for {action.dest}: {raw!r} (choose from {sorted(action.choices)})"
        )
    return raw


def _apply_config_file(args: argparse.Namespace, explicit: set[str],
                       parser: argparse.ArgumentParser) -> None:
    """File values fill in any option not given explicitly on the line."""
    if not getattr(args, "config", None):
        return
    actions = {a.dest: a for a in _walk_actions(parser)}
    values = _parse_config_file(args.config)
    for key, raw in values.items():
        if key not in actions or not hasattr(args, key):
            raise ConfigError(f"unknown config key {key!r}")
        if key in explicit:
            continue  # explicit flag wins
        setattr(args, key, _coerce(actions[key], raw))


def _default_out(args: argparse.Namespace) -> str:
    if getattr(args, "out", None):
        return args.out
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return env
    raise ConfigError(f"no output location: pass --out or set {OUTPUT_DIR_ENV}")


def _load_sources(args: argparse.Namespace):
    if getattr(args, "corpus_dir", None):
        return corpus_mod.read_sources_dir(args.corpus_dir)
    if getattr(args, "sources", None):
        return corpus_mod.read_sources_manifest(args.sources)
    raise ConfigError("one of --corpus-dir or --sources is required")


def _rebuild_corpus(manifest_path: str) -> corpus_mod.Corpus:
    manifest = corpus_mod.read_manifest(manifest_path)
    sources = []
    for entry in manifest.narratives:
        if not entry["included"]:
            continue
        path = entry.get("source_path")
        if not path or not Path(path).is_file():
            raise DataError(
                f"manifest entry {entry['id']!r} has no readable source_path"
            )
        sources.append(corpus_mod.RawNarrative(
            id=entry["id"], source_path=path,
            text=Path(path).read_text(encoding="utf-8"),
        ))
    built = corpus_mod.load_corpus(sources, n=manifest.n)
    if built.ids != manifest.included_ids:
        raise DataError("sources no longer match the manifest; re-run ingest")
    return built


def _parse_seeds(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in raw.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"bad seed list {raw!r}: {exc}") from exc


def cmd_ingest(args: argparse.Namespace) -> int:
    out = Path(_default_out(args))
    sources = _load_sources(args)
    built = corpus_mod.load_corpus(sources, n=args.n,
                                   min_paragraphs=args.min_paragraphs)
    out.mkdir(parents=True, exist_ok=True)
    dest = out / "corpus_manifest.json"
    corpus_mod.write_manifest(built, dest)
    print(dest)
    return 0


def _require(args: argparse.Namespace, *keys: str) -> None:
    for key in keys:
        if not getattr(args, key, None):
            raise ConfigError(f"--{key.replace('_', '-')} is required "
                              "(flag or config file)")


def cmd_embed_lsa(args: argparse.Namespace) -> int:
    _require(args, "manifest")
    out = Path(_default_out(args))
    built = _rebuild_corpus(args.manifest)
    tdm = lsa.build_term_doc(built, min_doc_freq=args.min_doc_freq)
    weights = lsa.entropy_weights(tdm)
    weighted = lsa.weight_matrix(tdm, weights)
    factors = lsa.truncated_svd(weighted, d=args.dims, seed=args.svd_seed)
    embeddings = lsa.embed_paragraphs(factors, tdm.doc_ids,
                                      normalize=args.normalize)
    out.mkdir(parents=True, exist_ok=True)
    dest = out / "embeddings_lsa.tsv"
    prov = (f"min_doc_freq={args.min_doc_freq} svd_seed={args.svd_seed} "
            f"normalize={str(args.normalize).lower()}")
    embedding_io.write_embeddings(embeddings, dest, method="lsa",
                                  provenance=prov)
    print(dest)
    return 0


def cmd_import_embeddings(args: argparse.Namespace) -> int:
    _require(args, "file", "manifest")
    embeddings = embedding_io.read_embeddings(args.file)
    manifest = corpus_mod.read_manifest(args.manifest)
    problems = embedding_io.validate(embeddings, manifest)
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        raise DataError(f"{len(problems)} discrepancies against the manifest")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        method, prov = embedding_io.read_method(args.file)
        dest = out / "embeddings_imported.tsv"
        embedding_io.write_embeddings(embeddings, dest, method=method,
                                      provenance=prov)
        print(dest)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    if bool(args.embeddings) == bool(args.manifest):
        raise ConfigError("exactly one of --embeddings or --manifest is required")
    out_dir = _default_out(args)

    svd_seed = args.svd_seed
    if args.embeddings:
        embeddings = embedding_io.read_embeddings(args.embeddings)
        method, _ = embedding_io.read_method(args.embeddings)
        svd_seed = None
    else:
        built = _rebuild_corpus(args.manifest)
        tdm = lsa.build_term_doc(built, min_doc_freq=args.min_doc_freq)
        weighted = lsa.weight_matrix(tdm, lsa.entropy_weights(tdm))
        factors = lsa.truncated_svd(weighted, d=args.dims, seed=args.svd_seed)
        embeddings = lsa.embed_paragraphs(factors, tdm.doc_ids,
                                          normalize=args.normalize)
        method = "lsa"

    endpoints = (1, embeddings.n) if args.pin_endpoints else None
    cfg = ExperimentConfig(
        metric=args.metric,
        solver=args.solver,
        endpoints=endpoints,
        shuffle_seeds=_parse_seeds(args.shuffle_seeds),
        alpha=args.alpha,
        subsample_n=args.subsample_n,
        subsample_seed=args.subsample_seed,
        embedding_method=method,
        dims=embeddings.dims,
        svd_seed=svd_seed,
    )
    report = run_experiment(embeddings, cfg)
    for path in write_artifacts(report, out_dir):
        print(path)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    _require(args, "report")
    doc = load_report(args.report)
    out = Path(_default_out(args))
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def render_run(tag: str, run: dict) -> None:
        table = render_table(tuple(run["atsp"]["sequence"]))
        dest = out / f"atsp_{tag}.txt"
        dest.write_text(table, encoding="utf-8")
        written.append(dest)
        tree = Tree(n=len(run["atsp"]["sequence"]),
                    edges=frozenset(tuple(e) for e in run["mst"]["edges"]),
                    total_weight=run["mst"]["weight"])
        dest = out / f"mst_{tag}.dot"
        dest.write_text(export_dot(tree), encoding="utf-8")
        written.append(dest)

    try:
        render_run("ordered", doc["ordered"])
        for run in doc["shuffled"]:
            render_run(f"shuffled_{run['shuffle_seed']}", run)
    except (KeyError, TypeError) as exc:
        raise DataError(f"report is missing fields: {exc}") from exc
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storytraj",
        description="Mean narrative trajectories: embed story openings, "
                    "solve MST / open-path TSP orderings, compare against "
                    "shuffled controls.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value config file; flags override")
        p.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV})")

    p = sub.add_parser("ingest", help="segment narratives and write a corpus manifest")
    add_common(p)
    p.add_argument("--corpus-dir", help="directory of .txt narratives")
    p.add_argument("--sources", help="text file listing narrative paths, one per line")
    p.add_argument("--n", type=int, default=50, help="paragraphs kept per story")
    p.add_argument("--min-paragraphs", type=int, default=None,
                   help="qualification bar (default n + 1: strictly more than n)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("embed-lsa", help="build log-entropy LSA embeddings from a manifest")
    add_common(p)
    p.add_argument("--manifest", help="corpus manifest JSON")
    p.add_argument("--dims", type=int, default=300)
    p.add_argument("--min-doc-freq", type=int, default=1)
    p.add_argument("--svd-seed", type=int, default=0)
    p.add_argument("--normalize", action="store_true",
                   help="scale each vector to unit length")
    p.set_defaults(func=cmd_embed_lsa)

    p = sub.add_parser("import-embeddings",
                       help="validate an interchange file against a manifest")
    add_common(p)
    p.add_argument("--file", help="embedding interchange file")
    p.add_argument("--manifest", help="corpus manifest JSON")
    p.set_defaults(func=cmd_import_embeddings)

    p = sub.add_parser("analyze", help="run the full ordered-vs-shuffled experiment")
    add_common(p)
    p.add_argument("--embeddings", help="embedding interchange file to analyze")
    p.add_argument("--manifest", help="corpus manifest (embeds with LSA first)")
    p.add_argument("--dims", type=int, default=300)
    p.add_argument("--min-doc-freq", type=int, default=1)
    p.add_argument("--svd-seed", type=int, default=0)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--metric", default="squared_euclidean",
                   choices=("squared_euclidean", "euclidean"))
    p.add_argument("--solver", default="heuristic", choices=("heuristic", "exact"))
    p.add_argument("--pin-endpoints", action="store_true",
                   help="force the path to start at paragraph 1 and end at n")
    p.add_argument("--shuffle-seeds", default="0,1,2,3,4,5,6,7,8,9",
                   help="comma-separated shuffle seeds")
    p.add_argument("--alpha", type=float, default=1.0,
                   help="action proportionality constant")
    p.add_argument("--subsample-n", type=int, default=None,
                   help="analyze a random subset of this many narratives")
    p.add_argument("--subsample-seed", type=int, default=0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("report", help="re-render tables and trees from a report JSON")
    add_common(p)
    p.add_argument("--report", help="report.json from analyze")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args, _explicit_keys(list(argv)), parser)
        return args.func(args)
    except StorytrajError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
