"""Command line for the doc2vec exporter.

    d2v-export --manifest corpus_manifest.json --out vectors.tsv \
               [--dims 300] [--epochs 40] [--window 5] [--min-count 2] \
               [--seed 1] [--keep-stopwords]
"""

from __future__ import annotations

import argparse
import sys

from .corpus import ExportError
from .train import TrainSpec, train_and_export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d2v-export",
        description="Train paragraph-level doc2vec (PV-DBOW) vectors and "
                    "write them in the embedding interchange format.",
    )
    parser.add_argument("--manifest", required=True,
                        help="corpus manifest JSON from the ingester")
    parser.add_argument("--out", required=True, help="output interchange file")
    parser.add_argument("--dims", type=int, default=300)
    parser.add_argument("--epochs", type=int, default=40)
    parser.add_argument("--window", type=int, default=5)
    parser.add_argument("--min-count", type=int, default=2)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--keep-stopwords", action="store_true",
                        help="skip the built-in stopword removal")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = TrainSpec(
        manifest=args.manifest,
        dims=args.dims,
        epochs=args.epochs,
        window=args.window,
        min_count=args.min_count,
        seed=args.seed,
        remove_stopwords=not args.keep_stopwords,
    )
    try:
        dest = train_and_export(spec, args.out)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(dest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
